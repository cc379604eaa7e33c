#include "vodsim/balancer.hpp"

#include "vodsim/errors.hpp"

#include <fmt/format.h>

#include <utility>

namespace vodsim {

LpsTable::LpsTable(std::vector<LpsEntry> entries) {
    for (auto& e : entries) add(std::move(e));
}

LpsTable LpsTable::with_proxies(int count) {
    LpsTable table;
    for (int i = 1; i <= count; ++i) {
        table.add({LpsId{static_cast<std::uint32_t>(i)}, fmt::format("LPS{}", i),
                   fmt::format("10.0.0.{}:8554", 10 + i), {}});
    }
    return table;
}

void LpsTable::add(LpsEntry entry) {
    if (find_ptr(entry.id) != nullptr) {
        throw Error(ErrorCode::ConfigInvalid,
                    fmt::format("lps id {} already present", to_int(entry.id)));
    }
    entries_.push_back(std::move(entry));
}

LpsId LpsTable::assign_lps() const {
    if (entries_.empty()) throw Error(ErrorCode::EmptyTable, "no proxies registered");
    const LpsEntry* best = &entries_.front();
    for (const auto& e : entries_) {
        const auto count = e.request_count();
        if (count < best->request_count() ||
            (count == best->request_count() && e.id < best->id)) {
            best = &e;
        }
    }
    return best->id;
}

void LpsTable::record_request(LpsId lps, ClientId client) {
    auto& e = find(lps);
    if (!e.client_ids.insert(client).second) {
        throw Error(ErrorCode::DuplicateClient,
                    fmt::format("client {} already recorded at LPS{}", to_int(client),
                                to_int(lps)));
    }
}

void LpsTable::release_request(LpsId lps, ClientId client) {
    auto& e = find(lps);
    if (e.client_ids.erase(client) == 0) {
        throw Error(ErrorCode::UnknownClient,
                    fmt::format("client {} not recorded at LPS{}", to_int(client), to_int(lps)));
    }
}

const LpsEntry& LpsTable::entry(LpsId lps) const {
    const auto* e = find_ptr(lps);
    if (e == nullptr) throw Error(ErrorCode::UnknownLps, fmt::format("no LPS{}", to_int(lps)));
    return *e;
}

LpsEntry& LpsTable::find(LpsId lps) {
    return const_cast<LpsEntry&>(std::as_const(*this).entry(lps));
}

const LpsEntry* LpsTable::find_ptr(LpsId lps) const {
    for (const auto& e : entries_) {
        if (e.id == lps) return &e;
    }
    return nullptr;
}

std::string LpsTable::to_csv() const {
    std::string out = "lps_id,name,address,request_count,client_ids\n";
    for (const auto& e : entries_) {
        std::string ids;
        for (auto c : e.client_ids) {
            if (!ids.empty()) ids += ';';
            ids += fmt::format("C{}", to_int(c));
        }
        out += fmt::format("{},{},{},{},{}\n", to_int(e.id), e.name, e.address,
                           e.request_count(), ids);
    }
    return out;
}

} // namespace vodsim
