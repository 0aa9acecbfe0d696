// Copyright 2026 The steerlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "steerlab/error.hpp"
#include "steerlab/ghjw.hpp"
#include "steerlab/identities.hpp"
#include "steerlab/linalg.hpp"
#include "steerlab/protocols.hpp"
#include "steerlab/states.hpp"
#include "steerlab/version.hpp"

/// JSON and CSV encodings for inputs, reports and transcripts.
namespace steerlab::report {

using Json = nlohmann::ordered_json;

// ===========================================================================
// Encoding

inline Json to_json(Complex z) {
    return Json::array({z.real(), z.imag()});
}

inline Json to_json(std::span<const Complex> v) {
    Json out = Json::array();
    for (const auto &z : v) out.push_back(to_json(z));
    return out;
}

inline Json to_json(const Matrix &m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); r++) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); c++) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json to_json(const Ensemble &e) {
    Json out = Json::array();
    for (const auto &el : e.elements()) {
        out.push_back({{"weight", el.weight}, {"state", to_json(el.state)}});
    }
    return out;
}

inline Json to_json(const std::optional<double> &x) {
    return x ? Json(*x) : Json(nullptr);
}

// ===========================================================================
// Decoding

namespace detail {

[[noreturn]] inline void fail(const std::string &path, const std::string &what) {
    throw Error(ErrorCode::ParseError, path + ": " + what);
}

inline double number(const Json &j, const std::string &path) {
    if (!j.is_number()) fail(path, "expected number");
    double x = j.get<double>();
    if (!std::isfinite(x)) fail(path, "expected finite number");
    return x;
}

}  // namespace detail

/// [re, im], or a bare real number.
inline Complex parse_complex(const Json &j, const std::string &path) {
    if (j.is_number()) return detail::number(j, path);
    if (!j.is_array() || j.size() != 2) detail::fail(path, "expected [re, im]");
    return {detail::number(j[0], path + "[0]"), detail::number(j[1], path + "[1]")};
}

inline Vector parse_vector(const Json &j, const std::string &path) {
    if (!j.is_array() || j.empty()) detail::fail(path, "expected nonempty array of complex numbers");
    Vector v;
    for (std::size_t i = 0; i < j.size(); i++) v.push_back(parse_complex(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

inline Matrix parse_matrix(const Json &j, const std::string &path) {
    if (!j.is_array() || j.empty()) detail::fail(path, "expected nonempty array of rows");
    std::vector<Vector> rows;
    for (std::size_t r = 0; r < j.size(); r++) {
        rows.push_back(parse_vector(j[r], path + "[" + std::to_string(r) + "]"));
        if (rows.back().size() != rows.front().size()) {
            detail::fail(path + "[" + std::to_string(r) + "]", "row length differs from row 0");
        }
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); r++) {
        for (std::size_t c = 0; c < rows[r].size(); c++) m(r, c) = rows[r][c];
    }
    return m;
}

/// An ensemble as written: well-formed JSON whose physical validity has not
/// been checked yet.
struct RawEnsemble {
    std::vector<std::pair<double, Vector>> elements;
};

inline RawEnsemble parse_raw_ensemble(const Json &j, const std::string &path) {
    if (!j.is_array() || j.empty()) detail::fail(path, "expected nonempty array of {weight, state}");
    RawEnsemble e;
    for (std::size_t i = 0; i < j.size(); i++) {
        std::string at = path + "[" + std::to_string(i) + "]";
        const Json &el = j[i];
        if (!el.is_object()) detail::fail(at, "expected object with weight and state");
        for (const auto &[key, _] : el.items()) {
            if (key != "weight" && key != "state") detail::fail(at + "." + key, "unknown field");
        }
        if (!el.contains("weight")) detail::fail(at + ".weight", "missing");
        if (!el.contains("state")) detail::fail(at + ".state", "missing");
        e.elements.emplace_back(detail::number(el["weight"], at + ".weight"), parse_vector(el["state"], at + ".state"));
    }
    return e;
}

/// Amplitudes written with a handful of digits are accepted when their norm is
/// within this distance of one, then rescaled exactly.
inline constexpr double kInputNormSlack = 1e-6;

/// Builds the Ensemble, rescaling nearly normalized states. Throws Error with
/// the library's code when the ensemble is not physical.
inline Ensemble build_ensemble(const RawEnsemble &raw) {
    std::vector<EnsembleElement> els;
    for (std::size_t i = 0; i < raw.elements.size(); i++) {
        const auto &[w, amps] = raw.elements[i];
        if (std::abs(steerlab::norm(amps) - 1) > kInputNormSlack) {
            throw Error(ErrorCode::DomainError, "state " + std::to_string(i) + " is not normalized");
        }
        els.push_back({w, StateVector::normalized(amps)});
    }
    return Ensemble(std::move(els));
}

inline Ensemble parse_ensemble(const Json &j, const std::string &path = "ensemble") {
    RawEnsemble raw = parse_raw_ensemble(j, path);
    try {
        return build_ensemble(raw);
    } catch (const Error &e) {
        detail::fail(path, e.what());
    }
}

/// Input for certification: {"density": rows} or {"from_first_ensemble": true},
/// plus "ensembles": [ensemble, ...].
struct GhjwConfig {
    std::optional<Matrix> density;
    bool from_first_ensemble = false;
    std::vector<RawEnsemble> ensembles;
    Json source;
};

inline GhjwConfig parse_ghjw_config(const std::string &text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) detail::fail("$", "expected object");
    for (const auto &[key, _] : j.items()) {
        if (key != "density" && key != "from_first_ensemble" && key != "ensembles") detail::fail(key, "unknown field");
    }
    GhjwConfig cfg;
    cfg.source = j;
    if (j.contains("from_first_ensemble")) {
        if (!j["from_first_ensemble"].is_boolean()) detail::fail("from_first_ensemble", "expected boolean");
        cfg.from_first_ensemble = j["from_first_ensemble"].get<bool>();
    }
    if (j.contains("density")) {
        if (cfg.from_first_ensemble) detail::fail("density", "conflicts with from_first_ensemble");
        cfg.density = parse_matrix(j["density"], "density");
    } else if (!cfg.from_first_ensemble) {
        detail::fail("density", "missing (or set from_first_ensemble to true)");
    }
    if (!j.contains("ensembles")) detail::fail("ensembles", "missing");
    const Json &es = j["ensembles"];
    if (!es.is_array() || es.empty()) detail::fail("ensembles", "expected nonempty array");
    for (std::size_t i = 0; i < es.size(); i++) {
        cfg.ensembles.push_back(parse_raw_ensemble(es[i], "ensembles[" + std::to_string(i) + "]"));
    }
    return cfg;
}

struct GhjwRun {
    DensityMatrix density;
    ghjw::CertificationReport report;
};

/// Resolves the reference density and certifies every candidate. Candidates
/// that are not even physical ensembles are reported as invalid alongside the
/// rest; a reference density that is not a density matrix throws.
inline GhjwRun certify_config(const GhjwConfig &cfg, double tol) {
    std::vector<std::optional<Ensemble>> built;
    std::vector<std::string> build_errors;
    for (const auto &raw : cfg.ensembles) {
        try {
            built.emplace_back(build_ensemble(raw));
            build_errors.emplace_back();
        } catch (const Error &e) {
            built.emplace_back();
            build_errors.emplace_back(e.what());
        }
    }
    std::optional<DensityMatrix> w;
    if (cfg.density) {
        w.emplace(*cfg.density, tol);
    } else {
        if (!built[0]) throw Error(ErrorCode::NotDensity, "ensembles[0]: " + build_errors[0]);
        try {
            w.emplace(built[0]->mixture(), tol);
        } catch (const Error &e) {
            throw Error(ErrorCode::NotDensity, "ensembles[0] does not mix to a density matrix");
        }
    }

    std::vector<Ensemble> usable;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < built.size(); i++) {
        if (built[i]) {
            usable.push_back(*built[i]);
            index.push_back(i);
        }
    }
    ghjw::CertificationReport inner = ghjw::certify(*w, usable, tol);
    ghjw::CertificationReport out;
    out.purification = inner.purification;
    if (inner.source_candidate) out.source_candidate = index[*inner.source_candidate];
    out.candidates.resize(built.size());
    for (std::size_t i = 0; i < built.size(); i++) {
        if (!built[i]) out.candidates[i].error = build_errors[i];
    }
    for (std::size_t k = 0; k < index.size(); k++) out.candidates[index[k]] = std::move(inner.candidates[k]);
    return {std::move(*w), std::move(out)};
}

// ===========================================================================
// Reports

inline Json check_json(const std::vector<protocols::Check> &checks) {
    Json out = Json::array();
    for (const auto &c : checks) {
        out.push_back({{"name", c.name},
                       {"value", to_json(c.value)},
                       {"expected", c.expected},
                       {"tolerance", c.tolerance},
                       {"passed", c.passed}});
    }
    return out;
}

inline Json ghjw_report_json(const GhjwConfig &cfg, const GhjwRun &run, const std::string &path, double tol) {
    Json config = {{"path", path},
                   {"tol", tol},
                   {"density_source", cfg.density ? "explicit" : "from_first_ensemble"},
                   {"input", cfg.source}};
    Json purification = nullptr;
    if (run.report.purification) {
        purification = {{"source_candidate", *run.report.source_candidate},
                        {"dim_alice", run.report.purification->dim_alice},
                        {"dim_bob", run.report.purification->dim_bob}};
    }
    Json candidates = Json::array();
    for (std::size_t i = 0; i < run.report.candidates.size(); i++) {
        const auto &c = run.report.candidates[i];
        Json table = Json::array();
        for (const auto &row : c.outcome_table) {
            table.push_back({{"label", row.label},
                             {"probability", row.probability},
                             {"fidelity", to_json(row.fidelity)},
                             {"target_weight", to_json(row.target_weight)}});
        }
        Json observable = nullptr;
        if (c.plan) {
            observable = Json::array();
            for (std::size_t k = 0; k < c.plan->observable.size(); k++) {
                const auto &o = c.plan->observable[k];
                Json entry = {{"label", o.label}, {"eigenvalue", o.eigenvalue}};
                if (k < c.plan->bob_states.size()) {
                    entry["state"] = to_json(canonical_phase(c.plan->bob_states[k]));
                } else {
                    entry["rank"] = std::llround(o.projector.trace().real());
                }
                observable.push_back(std::move(entry));
            }
        }
        candidates.push_back({{"index", i},
                              {"valid", c.valid},
                              {"error", c.error.empty() ? Json(nullptr) : Json(c.error)},
                              {"residual_probability", c.residual_probability},
                              {"outcome_table", std::move(table)},
                              {"bob_observable", std::move(observable)}});
    }
    return {{"schema", "ghjw-v1"},
            {"version", kVersion},
            {"config", std::move(config)},
            {"density", to_json(run.density.matrix())},
            {"purification", std::move(purification)},
            {"candidates", std::move(candidates)},
            {"all_certified", run.report.all_certified()}};
}

inline Json fable_report_json(const protocols::FableConfig &cfg, const protocols::ClaimReport &r,
                              const std::vector<protocols::Check> &checks, double stat_tol) {
    using namespace protocols;
    Json per_axis = Json::object();
    for (std::size_t ax = 0; ax < 3; ax++) {
        const auto &s = r.per_axis[ax];
        Json hist = nullptr;
        if (s.joint_histogram) {
            const auto &h = *s.joint_histogram;
            hist = {{"++", h[0]}, {"+-", h[1]}, {"-+", h[2]}, {"--", h[3]}};
        }
        per_axis[std::string(axis_name(static_cast<Axis>(ax)))] = {
            {"count", s.count},
            {"joint_histogram", std::move(hist)},
            {"alice_up_fraction", to_json(s.alice_up_fraction)},
            {"bob_up_fraction", to_json(s.bob_up_fraction)}};
    }
    return {{"schema", "fable-v1"},
            {"version", kVersion},
            {"config",
             {{"n_pairs", cfg.n_pairs},
              {"seed", cfg.seed},
              {"preparation", preparation_name(cfg.preparation)},
              {"strategy", strategy_name(cfg.carol_strategy)},
              {"ordering", ordering_name(cfg.ordering)},
              {"stat_tol", stat_tol}}},
            {"claims",
             {{"n_pairs", r.n_pairs},
              {"zz_fraction", to_json(r.zz_fraction)},
              {"zz_prediction_match_rate", to_json(r.zz_prediction_match_rate)},
              {"zz_raw_agreement_rate", to_json(r.zz_raw_agreement_rate)},
              {"flagged_fraction", to_json(r.flagged_fraction)},
              {"flagged_anticorrelation_rate", to_json(r.flagged_anticorrelation_rate)},
              {"anticorrelated_fraction", to_json(r.anticorrelated_fraction)},
              {"flagged_over_anticorrelated", to_json(r.flagged_over_anticorrelated)},
              {"carol_triplet_rejection_fraction", to_json(r.carol_triplet_rejection_fraction)},
              {"per_axis", std::move(per_axis)}}},
            {"checks", check_json(checks)},
            {"all_passed", all_passed(checks)}};
}

/// Bob's announced outcomes and Alice's candidate states, by basis.
inline std::array<const char *, 2> photon_bob_labels(protocols::PhotonBasis b) {
    if (b == protocols::PhotonBasis::HV) return {"H", "V"};
    return {"D", "Dbar"};
}
inline std::array<const char *, 2> photon_state_labels(protocols::PhotonBasis b) {
    if (b == protocols::PhotonBasis::HV) return {"H", "V"};
    return {"R", "L"};
}

inline Json photon_report_json(const protocols::PhotonTrickConfig &cfg, const protocols::PhotonReport &r,
                               const std::vector<protocols::Check> &checks, double stat_tol, double tol) {
    using namespace protocols;
    auto bob = photon_bob_labels(cfg.bob_basis);
    auto states = photon_state_labels(cfg.bob_basis);
    return {{"schema", "photon-trick-v1"},
            {"version", kVersion},
            {"config",
             {{"n_pairs", cfg.n_pairs},
              {"seed", cfg.seed},
              {"p", cfg.p},
              {"basis", photon_basis_name(cfg.bob_basis)},
              {"ordering", photon_ordering_name(cfg.ordering)},
              {"stat_tol", stat_tol},
              {"tol", tol}}},
            {"claims",
             {{"n_pairs", r.n_pairs},
              {"bob_labels", {bob[0], bob[1]}},
              {"alice_state_labels", {states[0], states[1]}},
              {"subensemble_fraction", {to_json(r.subensemble_fraction[0]), to_json(r.subensemble_fraction[1])}},
              {"match_rate", to_json(r.match_rate)},
              {"matched_pairs", r.matched_pairs},
              {"test_pass_rate", {to_json(r.test_pass_rate[0]), to_json(r.test_pass_rate[1])}},
              {"min_conditional_overlap", to_json(r.min_conditional_overlap)}}},
            {"checks", check_json(checks)},
            {"all_passed", all_passed(checks)}};
}

inline Json verify_report_json(const std::vector<identities::IdentityResult> &results, std::uint64_t seed, double tol,
                               double perturbation) {
    Json list = Json::array();
    bool ok = true;
    for (const auto &r : results) {
        list.push_back(
            {{"name", r.name}, {"cases", r.cases}, {"max_residual", r.max_residual}, {"passed", r.passed}});
        ok = ok && r.passed;
    }
    Json config = {{"seed", seed}, {"tol", tol}};
    if (perturbation != 0) config["perturbation"] = perturbation;
    return {{"schema", "verify-v1"},
            {"version", kVersion},
            {"config", std::move(config)},
            {"identities", std::move(list)},
            {"all_passed", ok}};
}

// ===========================================================================
// Transcripts

inline void write_fable_csv(std::ostream &out, const protocols::FableTranscript &t) {
    out << "# schema: fable-v1\n";
    out << "pair_id,axis,alice,bob,carol_label,carol_c1,carol_c2,carol_pred_alice,carol_pred_bob,carol_singlet_flag\n";
    for (const auto &r : t.records) {
        out << r.pair_id << ',' << axis_name(r.axis) << ',' << r.alice_outcome << ',' << r.bob_outcome << ','
            << r.carol.label << ',' << r.carol.raw_c1 << ',' << r.carol.raw_c2 << ',' << r.carol.predicted_alice
            << ',' << r.carol.predicted_bob << ',' << (r.carol.singlet_flag ? 1 : 0) << '\n';
    }
}

inline void write_photon_csv(std::ostream &out, const protocols::PhotonTranscript &t) {
    auto bob = photon_bob_labels(t.config.bob_basis);
    auto states = photon_state_labels(t.config.bob_basis);
    out << "# schema: photon-trick-v1\n";
    out << "pair_id,bob,alice_test,alice_pass\n";
    for (const auto &r : t.records) {
        out << r.pair_id << ',' << bob[r.bob_outcome] << ',' << states[r.alice_test] << ','
            << (r.alice_pass ? 1 : 0) << '\n';
    }
}

}  // namespace steerlab::report
