#include "vertisim/mqtt/subscription_tree.hpp"

#include <vector>

#include "vertisim/mqtt/topic.hpp"

namespace vertisim::mqtt {

struct SubscriptionTree::Node {
    std::map<std::string, std::unique_ptr<Node>, std::less<>> children;
    std::map<std::string, QoS> subscribers;

    bool empty() const { return children.empty() && subscribers.empty(); }
};

SubscriptionTree::SubscriptionTree() : root_(std::make_unique<Node>()) {}
SubscriptionTree::~SubscriptionTree() = default;
SubscriptionTree::SubscriptionTree(SubscriptionTree&&) noexcept = default;
SubscriptionTree& SubscriptionTree::operator=(SubscriptionTree&&) noexcept = default;

void SubscriptionTree::add(std::string_view filter, const std::string& subscriber, QoS qos) {
    Node* node = root_.get();
    for (auto level : split_levels(filter)) {
        auto it = node->children.find(level);
        if (it == node->children.end()) {
            it = node->children.emplace(std::string(level), std::make_unique<Node>()).first;
        }
        node = it->second.get();
    }
    const auto [_, inserted] = node->subscribers.insert_or_assign(subscriber, qos);
    if (inserted) ++count_;
    filters_by_subscriber_[subscriber].insert(std::string(filter));
}

bool SubscriptionTree::remove(std::string_view filter, const std::string& subscriber) {
    const auto levels = split_levels(filter);
    std::vector<Node*> path{root_.get()};
    for (auto level : levels) {
        auto it = path.back()->children.find(level);
        if (it == path.back()->children.end()) return false;
        path.push_back(it->second.get());
    }
    if (path.back()->subscribers.erase(subscriber) == 0) return false;
    --count_;
    if (auto it = filters_by_subscriber_.find(subscriber); it != filters_by_subscriber_.end()) {
        it->second.erase(std::string(filter));
        if (it->second.empty()) filters_by_subscriber_.erase(it);
    }
    // Prune empty branches bottom-up.
    for (std::size_t i = levels.size(); i > 0; --i) {
        if (!path[i]->empty()) break;
        auto& siblings = path[i - 1]->children;
        siblings.erase(siblings.find(levels[i - 1]));
    }
    return true;
}

void SubscriptionTree::remove_all(const std::string& subscriber) {
    auto it = filters_by_subscriber_.find(subscriber);
    if (it == filters_by_subscriber_.end()) return;
    const auto filters = it->second;
    for (const auto& f : filters) remove(f, subscriber);
}

namespace {

void collect(const std::map<std::string, QoS>& subs, std::map<std::string, QoS>& out) {
    for (const auto& [id, qos] : subs) {
        auto [it, inserted] = out.emplace(id, qos);
        if (!inserted && it->second < qos) it->second = qos;
    }
}

}  // namespace

std::map<std::string, QoS> SubscriptionTree::match(std::string_view topic) const {
    std::map<std::string, QoS> out;
    const auto levels = split_levels(topic);

    // Depth-first walk; each frame is (node, index of next topic level).
    std::vector<std::pair<const Node*, std::size_t>> stack{{root_.get(), 0}};
    while (!stack.empty()) {
        const auto [node, depth] = stack.back();
        stack.pop_back();

        if (auto hash = node->children.find("#"); hash != node->children.end()) {
            collect(hash->second->subscribers, out);
        }
        if (depth == levels.size()) {
            collect(node->subscribers, out);
            continue;
        }
        if (auto exact = node->children.find(levels[depth]); exact != node->children.end()) {
            stack.emplace_back(exact->second.get(), depth + 1);
        }
        if (auto plus = node->children.find("+"); plus != node->children.end()) {
            stack.emplace_back(plus->second.get(), depth + 1);
        }
    }
    return out;
}

}  // namespace vertisim::mqtt
