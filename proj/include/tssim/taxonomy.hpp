#pragma once

// Topic taxonomy: World Bank indicator topics merged into 13 analysis groups.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tssim {

class TopicTaxonomy {
public:
    TopicTaxonomy() = default;

    TopicTaxonomy(std::map<std::string, int> topic_groups, std::map<int, std::string> group_names)
        : topic_groups_(std::move(topic_groups)), group_names_(std::move(group_names)) {
        rebuild_prefixes();
    }

    /// The 13-group table used for the World Development Indicators topics.
    static TopicTaxonomy world_bank_default();

    /// Group for a topic: exact match first, then by the topic's major heading
    /// (the text before the first ':') when that heading maps to one group.
    std::optional<int> group_of_topic(std::string_view topic) const {
        if (auto it = topic_groups_.find(std::string(topic)); it != topic_groups_.end()) {
            return it->second;
        }
        if (auto it = prefix_groups_.find(major_heading(topic)); it != prefix_groups_.end()) {
            return it->second;
        }
        return std::nullopt;
    }

    std::optional<int> group_of_indicator(std::string_view indicator) const {
        auto it = indicator_topics_.find(std::string(indicator));
        if (it == indicator_topics_.end()) {
            return std::nullopt;
        }
        return group_of_topic(it->second);
    }

    std::optional<std::string> topic_of(std::string_view indicator) const {
        auto it = indicator_topics_.find(std::string(indicator));
        if (it == indicator_topics_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::string group_name(int group) const {
        auto it = group_names_.find(group);
        return it == group_names_.end() ? std::to_string(group) : it->second;
    }

    void set_indicator_topic(std::string indicator, std::string topic) {
        indicator_topics_[std::move(indicator)] = std::move(topic);
    }

    const std::map<std::string, std::string>& indicator_topics() const { return indicator_topics_; }
    const std::map<std::string, int>& topic_groups() const { return topic_groups_; }
    const std::map<int, std::string>& group_names() const { return group_names_; }

    friend bool operator==(const TopicTaxonomy& a, const TopicTaxonomy& b) {
        return a.topic_groups_ == b.topic_groups_ && a.group_names_ == b.group_names_ &&
               a.indicator_topics_ == b.indicator_topics_;
    }

private:
    static std::string major_heading(std::string_view topic) {
        auto pos = topic.find(':');
        auto head = topic.substr(0, pos);
        while (!head.empty() && head.back() == ' ') {
            head.remove_suffix(1);
        }
        return std::string(head);
    }

    void rebuild_prefixes() {
        prefix_groups_.clear();
        std::map<std::string, int> ambiguous;
        for (const auto& [topic, group] : topic_groups_) {
            auto head = major_heading(topic);
            auto [it, inserted] = prefix_groups_.emplace(head, group);
            if (!inserted && it->second != group) {
                ambiguous[head] = 1;
            }
        }
        for (const auto& [head, unused] : ambiguous) {
            prefix_groups_.erase(head);
        }
    }

    std::map<std::string, int> topic_groups_;
    std::map<int, std::string> group_names_;
    std::map<std::string, int> prefix_groups_;
    std::map<std::string, std::string> indicator_topics_;
};

inline TopicTaxonomy TopicTaxonomy::world_bank_default() {
    const std::vector<std::pair<int, std::vector<std::string>>> table = {
        {1,
         {"Economic Policy & Debt: Balance of payments: Capital & financial account",
          "Economic Policy & Debt: Balance of payments: Current account: Transfers",
          "Economic Policy & Debt: Balance of payments: Reserves & other items",
          "Economic Policy & Debt: External debt: Debt outstanding",
          "Economic Policy & Debt: External debt: Debt ratios & other items",
          "Economic Policy & Debt: External debt: Debt service",
          "Economic Policy & Debt: External debt: Net flows",
          "Economic Policy & Debt: National accounts: Adjusted savings & income",
          "Economic Policy & Debt: National accounts: Atlas GNI & GNI per capita",
          "Economic Policy & Debt: National accounts: Growth rates",
          "Economic Policy & Debt: National accounts: Local currency at constant prices: Aggregate indicators",
          "Economic Policy & Debt: National accounts: Local currency at constant prices: Expenditure on GDP",
          "Economic Policy & Debt: National accounts: Local currency at constant prices: Other items",
          "Economic Policy & Debt: National accounts: Local currency at constant prices: Value added",
          "Economic Policy & Debt: National accounts: Local currency at current prices: Aggregate indicators",
          "Economic Policy & Debt: National accounts: Local currency at current prices: Expenditure on GDP",
          "Economic Policy & Debt: National accounts: Local currency at current prices: Value added",
          "Economic Policy & Debt: National accounts: Shares of GDP & other",
          "Economic Policy & Debt: National accounts: US$ at constant 2015 prices: Aggregate indicators",
          "Economic Policy & Debt: National accounts: US$ at constant 2015 prices: Expenditure on GDP",
          "Economic Policy & Debt: National accounts: US$ at constant 2015 prices: Value added",
          "Economic Policy & Debt: National accounts: US$ at current prices: Aggregate indicators",
          "Economic Policy & Debt: National accounts: US$ at current prices: Expenditure on GDP",
          "Economic Policy & Debt: National accounts: US$ at current prices: Value added",
          "Economic Policy & Debt: Official development assistance",
          "Economic Policy & Debt: Purchasing power parity"}},
        {2, {"Education: Efficiency", "Education: Inputs", "Education: Outcomes", "Education: Participation"}},
        {3, {"Employment and Time Use"}},
        {4,
         {"Environment: Agricultural production", "Environment: Biodiversity & protected areas",
          "Environment: Density & urbanization", "Environment: Emissions", "Environment: Energy production & use",
          "Environment: Freshwater", "Environment: Land use", "Environment: Natural resources contribution to GDP"}},
        {5,
         {"Financial Sector: Access", "Financial Sector: Capital markets", "Financial Sector: Exchange rates & prices",
          "Financial Sector: Interest rates", "Financial Sector: Monetary holdings (liabilities)"}},
        {6, {"Gender: Public life & decision making"}},
        {7,
         {"Health: Disease prevention", "Health: Health systems", "Health: Mortality", "Health: Nutrition",
          "Health: Population: Dynamics", "Health: Reproductive health", "Health: Risk factors",
          "Health: Universal Health Coverage"}},
        {8, {"Infrastructure: Communications", "Infrastructure: Technology", "Infrastructure: Transportation"}},
        {9, {"Poverty: Income distribution", "Poverty: Poverty rates", "Poverty: Shared prosperity"}},
        {10,
         {"Private Sector & Trade: Exports", "Private Sector & Trade: Imports",
          "Private Sector & Trade: Total merchandise trade", "Private Sector & Trade: Trade price indices",
          "Private Sector & Trade: Travel & tourism"}},
        {11,
         {"Public Sector: Conflict & fragility", "Public Sector: Defense & arms trade",
          "Public Sector: Government finance: Deficit & financing", "Public Sector: Government finance: Expense",
          "Public Sector: Government finance: Revenue", "Public Sector: Policy & institutions"}},
        {12,
         {"Social Protection & Labor: Economic activity", "Social Protection & Labor: Labor force structure",
          "Social Protection & Labor: Migration", "Social Protection & Labor: Unemployment"}},
        {13, {"Trade"}},
    };
    std::map<std::string, int> topics;
    for (const auto& [group, names] : table) {
        for (const auto& name : names) {
            topics.emplace(name, group);
        }
    }
    std::map<int, std::string> groups = {
        {1, "Economic"},         {2, "Education"},       {3, "Employment and Time Use"},
        {4, "Environment"},      {5, "Financial"},       {6, "Gender: Public life & decision making"},
        {7, "Health"},           {8, "Infrastructure"},  {9, "Poverty"},
        {10, "Private Sector"},  {11, "Public Sector"},  {12, "Social Protection"},
        {13, "Trade"},
    };
    return TopicTaxonomy(std::move(topics), std::move(groups));
}

} // namespace tssim
