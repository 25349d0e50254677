#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "vertisim/mqtt/packet.hpp"

namespace vertisim::mqtt {

/// Trie of topic filters keyed by level; `+` and `#` are ordinary children
/// that the lookup walks specially.
class SubscriptionTree {
public:
    SubscriptionTree();
    ~SubscriptionTree();
    SubscriptionTree(SubscriptionTree&&) noexcept;
    SubscriptionTree& operator=(SubscriptionTree&&) noexcept;

    /// Adds or replaces (same filter, same subscriber) a subscription.
    void add(std::string_view filter, const std::string& subscriber, QoS qos);
    bool remove(std::string_view filter, const std::string& subscriber);
    void remove_all(const std::string& subscriber);

    /// Subscribers matching `topic`, each with the highest QoS among its
    /// overlapping filters. Ordered by subscriber id.
    std::map<std::string, QoS> match(std::string_view topic) const;

    std::size_t size() const { return count_; }

private:
    struct Node;

    std::unique_ptr<Node> root_;
    std::map<std::string, std::set<std::string>> filters_by_subscriber_;
    std::size_t count_ = 0;
};

}  // namespace vertisim::mqtt
