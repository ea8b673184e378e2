#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nblod/neighbors.hpp"
#include "nblod/space.hpp"

namespace nblod {

// (fp|sp)-(knn|rknn|hy|nan|non)-(ss|ds), case-insensitive.
struct MethodTag {
    TransformKind space;
    SetKind kind;
    Methodology methodology;

    bool operator==(const MethodTag&) const = default;
};

inline std::string format_method_tag(const MethodTag& t) {
    std::string s = t.space == TransformKind::FullSpace ? "FP-" : "SP-";
    switch (t.kind) {
    case SetKind::Knn: s += "KNN"; break;
    case SetKind::Rknn: s += "RKNN"; break;
    case SetKind::Hybrid: s += "Hy"; break;
    case SetKind::Natural: s += "NaN"; break;
    case SetKind::NonNatural: s += "Non"; break;
    }
    s += t.methodology == Methodology::StaticSorting ? "-SS" : "-DS";
    return s;
}

// The 20-method grid in fixed table order: FP-SS, FP-DS, SP-SS, SP-DS blocks,
// each with kinds KNN, RKNN, Hy, NaN, Non.
inline std::vector<MethodTag> all_method_tags() {
    std::vector<MethodTag> out;
    out.reserve(20);
    const SetKind kinds[] = {SetKind::Knn, SetKind::Rknn, SetKind::Hybrid, SetKind::Natural,
                             SetKind::NonNatural};
    for (TransformKind space : {TransformKind::FullSpace, TransformKind::PcaSubspace})
        for (Methodology meth : {Methodology::StaticSorting, Methodology::DynamicSelection})
            for (SetKind kind : kinds) out.push_back({space, kind, meth});
    return out;
}

inline MethodTag parse_method_tag(const std::string& raw) {
    const auto fail = [&raw]() -> MethodTag {
        std::ostringstream msg;
        msg << "invalid method tag '" << raw << "'; valid tags:";
        for (const auto& t : all_method_tags()) msg << " " << format_method_tag(t);
        throw std::invalid_argument(msg.str());
    };
    const std::size_t p1 = raw.find('-');
    if (p1 == std::string::npos) return fail();
    const std::size_t p2 = raw.find('-', p1 + 1);
    if (p2 == std::string::npos || raw.find('-', p2 + 1) != std::string::npos) return fail();
    try {
        return {parse_space(raw.substr(0, p1)), parse_set_kind(raw.substr(p1 + 1, p2 - p1 - 1)),
                parse_methodology(raw.substr(p2 + 1))};
    } catch (const std::invalid_argument&) {
        return fail();
    }
}

} // namespace nblod
