#pragma once

#include "vodsim/domain.hpp"

#include <set>
#include <span>
#include <string>
#include <vector>

namespace vodsim {

/// One row of the forwarder's proxy table. The request count is the number
/// of clients currently recorded against the proxy.
struct LpsEntry {
    LpsId id{};
    std::string name;
    std::string address;  // host:port, never parsed
    std::set<ClientId> client_ids;

    std::size_t request_count() const noexcept { return client_ids.size(); }

    friend bool operator==(const LpsEntry&, const LpsEntry&) = default;
};

/// Per-forwarder proxy accounting with least-requests assignment.
/// Mutations either apply fully or throw without changing the table.
class LpsTable {
public:
    LpsTable() = default;
    explicit LpsTable(std::vector<LpsEntry> entries);

    /// `count` proxies with ids 1..count named LPS1.. and placeholder
    /// addresses.
    static LpsTable with_proxies(int count);

    void add(LpsEntry entry);

    /// Proxy with the fewest requests; ties go to the smallest id.
    /// Throws Error(EmptyTable).
    LpsId assign_lps() const;

    /// Throws Error(UnknownLps) or Error(DuplicateClient).
    void record_request(LpsId lps, ClientId client);

    /// Throws Error(UnknownLps) or Error(UnknownClient).
    void release_request(LpsId lps, ClientId client);

    const LpsEntry& entry(LpsId lps) const;
    std::span<const LpsEntry> entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    /// lps_id,name,address,request_count,client_ids (ids joined by ';').
    std::string to_csv() const;

    friend bool operator==(const LpsTable&, const LpsTable&) = default;

private:
    LpsEntry& find(LpsId lps);
    const LpsEntry* find_ptr(LpsId lps) const;

    std::vector<LpsEntry> entries_;
};

} // namespace vodsim
