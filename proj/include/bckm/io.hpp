#ifndef BCKM_IO_HPP
#define BCKM_IO_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "constraints.hpp"
#include "fit_result.hpp"
#include "metrics.hpp"
#include "penalty_assignment.hpp"
#include "synthgen.hpp"

/**
 * @file io.hpp
 *
 * @brief JSON forms of constraint sets, fit results and evaluation reports.
 *
 * Constraints file:
 * @code
 * {"k": 3, "lower": [2, 2, 2], "upper": [null, 4, null],
 *  "must_link": [[0, 1]], "cannot_link": [[0, 5]], "cannot_link_groups": [[2, 3, 4]]}
 * @endcode
 * "k" may be omitted when "lower" is present; missing bounds default to 0
 * and unbounded.
 */

namespace bckm {

using Json = nlohmann::ordered_json;

namespace internal {

inline std::vector<LinkPair> parse_pairs(const Json& j, const char* field) {
    std::vector<LinkPair> out;
    if (!j.contains(field)) {
        return out;
    }
    const Json& arr = j.at(field);
    if (!arr.is_array()) {
        throw ParseError(std::string(field) + " must be an array of [p, q] pairs");
    }
    for (std::size_t t = 0; t < arr.size(); ++t) {
        const Json& pr = arr[t];
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() || !pr[1].is_number_integer()) {
            throw ParseError(std::string(field) + "[" + std::to_string(t) + "] must be a pair of integers");
        }
        out.push_back({pr[0].get<int>(), pr[1].get<int>()});
    }
    return out;
}

inline Json pairs_json(const std::vector<LinkPair>& pairs) {
    Json arr = Json::array();
    for (const auto& pr : pairs) {
        arr.push_back({pr.p, pr.q});
    }
    return arr;
}

} // namespace internal

inline ConstraintSet constraints_from_json(const Json& j) {
    if (!j.is_object()) {
        throw ParseError("constraints must be a JSON object");
    }
    int k = 0;
    if (j.contains("k")) {
        if (!j.at("k").is_number_integer() || j.at("k").get<int>() < 1) {
            throw ParseError("k must be a positive integer");
        }
        k = j.at("k").get<int>();
    } else if (j.contains("lower") && j.at("lower").is_array()) {
        k = static_cast<int>(j.at("lower").size());
    } else {
        throw ParseError("constraints need \"k\" or a \"lower\" array");
    }
    ConstraintSet cs = ConstraintSet::unconstrained(k);
    if (j.contains("lower")) {
        const Json& lo = j.at("lower");
        if (!lo.is_array() || lo.size() != static_cast<std::size_t>(k)) {
            throw ParseError("lower must be an array of " + std::to_string(k) + " integers");
        }
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (!lo[i].is_number_integer()) {
                throw ParseError("lower[" + std::to_string(i) + "] must be an integer");
            }
            cs.lower[i] = lo[i].get<int>();
        }
    }
    if (j.contains("upper")) {
        const Json& up = j.at("upper");
        if (!up.is_array() || up.size() != static_cast<std::size_t>(k)) {
            throw ParseError("upper must be an array of " + std::to_string(k) + " integers or nulls");
        }
        for (std::size_t i = 0; i < up.size(); ++i) {
            if (up[i].is_null()) {
                continue;
            }
            if (!up[i].is_number_integer()) {
                throw ParseError("upper[" + std::to_string(i) + "] must be an integer or null");
            }
            cs.upper[i] = up[i].get<int>();
        }
    }
    cs.must_link = internal::parse_pairs(j, "must_link");
    cs.cannot_link = internal::parse_pairs(j, "cannot_link");
    if (j.contains("cannot_link_groups")) {
        const Json& groups = j.at("cannot_link_groups");
        if (!groups.is_array()) {
            throw ParseError("cannot_link_groups must be an array of index arrays");
        }
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (!groups[g].is_array()) {
                throw ParseError("cannot_link_groups[" + std::to_string(g) + "] must be an array");
            }
            std::vector<int> members;
            for (const auto& v : groups[g]) {
                if (!v.is_number_integer()) {
                    throw ParseError("cannot_link_groups[" + std::to_string(g) + "] must hold integers");
                }
                members.push_back(v.get<int>());
            }
            cs.cannot_link_groups.push_back(std::move(members));
        }
    }
    return cs;
}

inline Json to_json(const ConstraintSet& cs) {
    Json j;
    j["k"] = cs.num_clusters();
    j["lower"] = cs.lower;
    Json up = Json::array();
    for (const auto& u : cs.upper) {
        up.push_back(u ? Json(*u) : Json(nullptr));
    }
    j["upper"] = up;
    j["must_link"] = internal::pairs_json(cs.must_link);
    j["cannot_link"] = internal::pairs_json(cs.cannot_link);
    if (!cs.cannot_link_groups.empty()) {
        j["cannot_link_groups"] = cs.cannot_link_groups;
    }
    return j;
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

inline ConstraintSet load_constraints(const std::string& path) {
    try {
        return constraints_from_json(read_json_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void save_constraints(const std::string& path, const ConstraintSet& cs) { write_json_file(path, to_json(cs)); }

inline Json to_json(const ViolationReport& v) {
    Json sizes = Json::array();
    for (const auto& s : v.size_violations) {
        sizes.push_back({{"cluster", s.cluster},
                         {"actual", s.actual},
                         {"lower", s.lower},
                         {"upper", s.upper ? Json(*s.upper) : Json(nullptr)}});
    }
    return {{"empty", v.empty()},
            {"size_violations", sizes},
            {"must_link_violations", internal::pairs_json(v.must_link_violations)},
            {"cannot_link_violations", internal::pairs_json(v.cannot_link_violations)},
            {"assignment_violations", v.assignment_violations},
            {"nonbinary_entries", v.nonbinary_entries}};
}

inline Json to_json(const AssignmentDiagnostics& d) {
    return {{"converged", d.converged},
            {"iterations", d.iterations},
            {"nonbinary", d.nonbinary},
            {"violations", to_json(d.violations)},
            {"objective", d.objective},
            {"lp_iterations", d.lp_iterations}};
}

inline Json to_json(const FitResult& r) {
    Json history = Json::array();
    for (const auto& h : r.history) {
        Json rec = {{"iteration", h.iteration}, {"centroid_delta", h.centroid_delta}, {"objective", h.objective}};
        if (r.algorithm == "bckm") {
            rec["assignment"] = to_json(h.assignment);
        }
        history.push_back(rec);
    }
    Json centroids = Json::array();
    for (Index i = 0; i < r.centroids.num_clusters(); ++i) {
        std::vector<double> col(r.centroids.centroid(i).begin(), r.centroids.centroid(i).end());
        centroids.push_back(col);
    }
    return {{"algorithm", r.algorithm},
            {"converged", r.converged},
            {"outer_iterations", r.outer_iterations},
            {"wcss", r.wcss},
            {"seconds", r.seconds},
            {"sizes", r.labels.cluster_sizes()},
            {"violations", to_json(r.violations)},
            {"labels", r.labels.values()},
            {"centroids", centroids},
            {"history", history}};
}

inline Json to_json(const EvalReport& e) {
    return {{"nmi", e.nmi ? Json(*e.nmi) : Json(nullptr)},
            {"wcss", e.wcss},
            {"sizes", e.sizes},
            {"violations", to_json(e.violations)},
            {"runtime_seconds", e.runtime_seconds}};
}

inline Json to_json(const SynthSpec& s) {
    return {{"k", s.k}, {"n", s.n}, {"d", s.d}, {"sigma", s.sigma}, {"link_fraction", s.link_fraction},
            {"seed", s.seed}};
}

} // namespace bckm

#endif
