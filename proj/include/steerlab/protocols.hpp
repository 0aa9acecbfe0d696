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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "steerlab/ghjw.hpp"
#include "steerlab/linalg.hpp"
#include "steerlab/rng.hpp"
#include "steerlab/states.hpp"

/// Monte Carlo versions of two remote-preparation stories: the polarization
/// trick (Bob sorts Alice's photons into either of two ensembles with the
/// same density matrix) and the three-party spin fable (Carol labels Alice
/// and Bob's data as either a product-state or a singlet/triplet ensemble).
namespace steerlab::protocols {

namespace detail {

/// Runs `simulate(pair_id)` for every pair, split into contiguous shards.
/// Each pair owns its random substream, so the result does not depend on
/// `threads`.
template <typename Record, typename Fn>
std::vector<Record> simulate_pairs(std::uint64_t n_pairs, unsigned threads, Fn simulate) {
    std::vector<Record> records(n_pairs);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(n_pairs, 1))));
    auto shard = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t id = begin; id < end; id++) records[id] = simulate(id);
    };
    if (threads == 1) {
        shard(0, n_pairs);
        return records;
    }
    std::vector<std::thread> pool;
    std::uint64_t chunk = (n_pairs + threads - 1) / threads;
    for (unsigned t = 0; t < threads; t++) {
        std::uint64_t begin = std::min<std::uint64_t>(n_pairs, t * chunk);
        std::uint64_t end = std::min<std::uint64_t>(n_pairs, begin + chunk);
        pool.emplace_back(shard, begin, end);
    }
    for (auto &th : pool) th.join();
    return records;
}

inline std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

inline int spin_sign(std::size_t outcome_index) {
    return outcome_index == 0 ? +1 : -1;
}

}  // namespace detail

// ===========================================================================
// Polarization trick

enum class PhotonBasis { HV, Diagonal };
enum class PhotonOrdering { BobFirst, AliceFirst };

inline std::string_view photon_basis_name(PhotonBasis b) {
    return b == PhotonBasis::HV ? "hv" : "diagonal";
}
inline std::string_view photon_ordering_name(PhotonOrdering o) {
    return o == PhotonOrdering::BobFirst ? "bob-first" : "alice-first";
}

struct PhotonTrickConfig {
    std::uint64_t n_pairs = 100000;
    std::uint64_t seed = 0;
    /// Weight of |H> in Alice's density matrix p|H><H| + q|V><V|.
    double p = 0.7;
    PhotonBasis bob_basis = PhotonBasis::HV;
    PhotonOrdering ordering = PhotonOrdering::BobFirst;
    unsigned threads = 1;

    void validate() const {
        if (!(p > 0 && p < 1)) {
            throw Error(ErrorCode::DomainError, "p must lie in (0, 1)");
        }
    }
};

/// One photon pair. Bob's outcome mu announces "your photon is phi_mu"; Alice
/// independently picks one target state phi_k and tests for it.
struct PhotonRecord {
    std::uint64_t pair_id = 0;
    std::size_t bob_outcome = 0;
    std::size_t alice_test = 0;
    bool alice_pass = false;
};

struct PhotonTranscript {
    PhotonTrickConfig config;
    std::vector<PhotonRecord> records;
};

struct PhotonReport {
    std::uint64_t n_pairs = 0;
    /// Fraction of Alice's photons Bob assigns to phi_0 / phi_1 (H/V for the
    /// HV basis, R/L via his D/Dbar outcomes for the diagonal basis).
    std::array<std::optional<double>, 2> subensemble_fraction;
    /// Among pairs where Alice tested the state Bob announced, the fraction
    /// whose test passed.
    std::optional<double> match_rate;
    std::uint64_t matched_pairs = 0;
    /// Pass rate of Alice's test for phi_k, over pairs where she chose k.
    std::array<std::optional<double>, 2> test_pass_rate;
    /// Smallest |<phi_mu|Alice's conditional state>| right after Bob's
    /// measurement. Only defined when Bob measures first.
    std::optional<double> min_conditional_overlap;
};

/// Alice's candidate ensembles: {(p, H), (q, V)} or {(1/2, R), (1/2, L)}.
inline Ensemble photon_target_ensemble(double p, PhotonBasis basis) {
    if (basis == PhotonBasis::HV) {
        return Ensemble({{p, ket_h()}, {1 - p, ket_v()}});
    }
    return Ensemble({{0.5, ket_r(p)}, {0.5, ket_l(p)}});
}

/// sqrt(p)|HH> + sqrt(q)|VV>.
inline ghjw::Purification photon_pair_state(double p) {
    return ghjw::purify_from_ensemble(photon_target_ensemble(p, PhotonBasis::HV), 2);
}

inline PhotonReport summarize_photon_trick(const PhotonTranscript &t) {
    PhotonReport r;
    r.n_pairs = t.records.size();
    std::array<std::uint64_t, 2> bob{}, tests{}, passes{};
    std::uint64_t matched = 0, matched_pass = 0;
    for (const auto &rec : t.records) {
        bob[rec.bob_outcome]++;
        tests[rec.alice_test]++;
        passes[rec.alice_test] += rec.alice_pass;
        if (rec.alice_test == rec.bob_outcome) {
            matched++;
            matched_pass += rec.alice_pass;
        }
    }
    for (std::size_t k = 0; k < 2; k++) {
        r.subensemble_fraction[k] = detail::ratio(bob[k], r.n_pairs);
        r.test_pass_rate[k] = detail::ratio(passes[k], tests[k]);
    }
    r.match_rate = detail::ratio(matched_pass, matched);
    r.matched_pairs = matched;
    return r;
}

inline std::pair<PhotonTranscript, PhotonReport> run_photon_trick(const PhotonTrickConfig &cfg) {
    cfg.validate();
    const ghjw::Purification pair = photon_pair_state(cfg.p);
    const Ensemble target = photon_target_ensemble(cfg.p, cfg.bob_basis);
    // Bob's basis is whatever realizes the chosen ensemble: {H, V} or {D, Dbar}.
    const ghjw::SteeringPlan plan = ghjw::steering_observable(pair, target);
    std::vector<ProjectiveObservable> alice_tests;
    for (std::size_t k = 0; k < 2; k++) {
        Vector phi = target[k].state.amplitudes();
        Matrix pass = Matrix::outer(phi, phi);
        alice_tests.emplace_back(std::vector<ObservableOutcome>{
            {"pass", 1.0, pass}, {"fail", 0.0, Matrix::identity(2) - pass}});
    }

    const std::size_t dims[] = {2, 2};
    const std::size_t alice[] = {0};
    const std::size_t bob[] = {1};
    const Stream master(cfg.seed);

    struct Sim {
        PhotonRecord rec;
        double overlap = 1;
    };
    auto sims = detail::simulate_pairs<Sim>(cfg.n_pairs, cfg.threads, [&](std::uint64_t id) {
        Stream rng = master.child(id);
        Sim s;
        s.rec.pair_id = id;
        s.rec.alice_test = rng.below(2);
        const auto &test = alice_tests[s.rec.alice_test];
        StateVector state = pair.joint;
        if (cfg.ordering == PhotonOrdering::BobFirst) {
            auto b = measure_subsystem(state, dims, bob, plan.observable, rng);
            s.rec.bob_outcome = b.index;
            Vector phi = ghjw::alice_component(b.post_state, 2, 2, plan.bob_states[b.index]);
            s.overlap = std::abs(inner(target[b.index].state, phi)) / steerlab::norm(phi);
            auto a = measure_subsystem(b.post_state, dims, alice, test, rng);
            s.rec.alice_pass = a.index == 0;
        } else {
            auto a = measure_subsystem(state, dims, alice, test, rng);
            s.rec.alice_pass = a.index == 0;
            auto b = measure_subsystem(a.post_state, dims, bob, plan.observable, rng);
            s.rec.bob_outcome = b.index;
        }
        return s;
    });

    PhotonTranscript t{cfg, {}};
    t.records.reserve(sims.size());
    double min_overlap = 1;
    for (const auto &s : sims) {
        t.records.push_back(s.rec);
        min_overlap = std::min(min_overlap, s.overlap);
    }
    PhotonReport report = summarize_photon_trick(t);
    if (cfg.ordering == PhotonOrdering::BobFirst && cfg.n_pairs > 0) {
        report.min_conditional_overlap = min_overlap;
    }
    return {std::move(t), report};
}

// ===========================================================================
// The spin fable

enum class Preparation { DirectCaseI, DirectCaseII, EntangledQuartet };
enum class CarolStrategy { CaseITrick, CaseIITrick };
enum class Ordering { CarolFirst, CarolLast };

inline std::string_view preparation_name(Preparation p) {
    switch (p) {
        case Preparation::DirectCaseI: return "direct1";
        case Preparation::DirectCaseII: return "direct2";
        case Preparation::EntangledQuartet: return "quartet";
    }
    return "?";
}
inline std::string_view strategy_name(CarolStrategy s) {
    return s == CarolStrategy::CaseITrick ? "case1" : "case2";
}
inline std::string_view ordering_name(Ordering o) {
    return o == Ordering::CarolFirst ? "first" : "last";
}

struct FableConfig {
    std::uint64_t n_pairs = 100000;
    std::uint64_t seed = 0;
    Preparation preparation = Preparation::EntangledQuartet;
    CarolStrategy carol_strategy = CarolStrategy::CaseITrick;
    Ordering ordering = Ordering::CarolFirst;
    unsigned threads = 1;

    /// Direct preparations leave Carol nothing to measure: her knowledge is
    /// the preparation record, so strategy must match and she goes first.
    void validate() const {
        if (preparation == Preparation::EntangledQuartet) return;
        auto needed = preparation == Preparation::DirectCaseI ? CarolStrategy::CaseITrick : CarolStrategy::CaseIITrick;
        if (carol_strategy != needed) {
            throw Error(ErrorCode::ConfigConflict, std::string(preparation_name(preparation)) +
                                                       " preparation requires the " +
                                                       std::string(strategy_name(needed)) + " strategy");
        }
        if (ordering != Ordering::CarolFirst) {
            throw Error(ErrorCode::ConfigConflict, "direct preparations require Carol-first ordering");
        }
    }
};

/// What Carol knows about one pair.
struct CarolRecord {
    /// Case I: z-values "uu", "ud", "du", "dd" (Carol's own spins for the
    /// quartet, Alice/Bob's prepared spins for direct1). Case II: "singlet",
    /// "t+1", "t-1", "t0" when she resolves the full basis, otherwise
    /// "singlet" or "triplet".
    std::string label;
    /// Carol's own measured z-spins (c1, c2); 0 when she measured none.
    int raw_c1 = 0;
    int raw_c2 = 0;
    /// Case I: Carol's announced z-values for Alice and Bob; 0 otherwise.
    int predicted_alice = 0;
    int predicted_bob = 0;
    /// Case II: Carol vouches that this pair is (or was prepared as) a singlet.
    bool singlet_flag = false;
};

struct RunRecord {
    std::uint64_t pair_id = 0;
    Axis axis = Axis::Z;
    int alice_outcome = 0;
    int bob_outcome = 0;
    CarolRecord carol;
};

struct FableTranscript {
    FableConfig config;
    std::vector<RunRecord> records;
};

struct AxisStats {
    std::uint64_t count = 0;
    /// Joint frequencies of (alice, bob) = (+,+), (+,-), (-,+), (-,-).
    std::optional<std::array<double, 4>> joint_histogram;
    std::optional<double> alice_up_fraction;
    std::optional<double> bob_up_fraction;
};

struct ClaimReport {
    std::uint64_t n_pairs = 0;
    /// Fraction of pairs measured along the common z axis.
    std::optional<double> zz_fraction;
    /// Case I: among z runs, fraction where Carol's predictions match both outcomes.
    std::optional<double> zz_prediction_match_rate;
    /// Case I on the quartet: the same, using Carol's raw (unnegated) spins.
    std::optional<double> zz_raw_agreement_rate;
    /// Case II: fraction of pairs Carol flags as singlets.
    std::optional<double> flagged_fraction;
    /// Case II: among flagged pairs, fraction with alice = -bob.
    std::optional<double> flagged_anticorrelation_rate;
    /// Fraction of all pairs with alice = -bob.
    std::optional<double> anticorrelated_fraction;
    /// Case II: flagged pairs as a fraction of anticorrelated pairs.
    std::optional<double> flagged_over_anticorrelated;
    /// Case II, Carol last: fraction of her pairs found with total spin one.
    std::optional<double> carol_triplet_rejection_fraction;
    /// Indexed by Axis (x, y, z).
    std::array<AxisStats, 3> per_axis;
};

struct PreparedPair {
    std::size_t label;
    StateVector state;
};

/// Four equally likely z-product states |up up>, |up down>, |down up>, |down down> (Alice first).
inline const std::vector<StateVector> &case_i_states() {
    static const std::vector<StateVector> states = {
        tensor_product(spin_up(), spin_up()), tensor_product(spin_up(), spin_down()),
        tensor_product(spin_down(), spin_up()), tensor_product(spin_down(), spin_down())};
    return states;
}

/// Singlet |0,0>, then triplets |1,1>, |1,-1>, |1,0>.
inline const std::vector<StateVector> &case_ii_states() {
    static const std::vector<StateVector> states = {singlet(), triplet_up(), triplet_down(), triplet_zero()};
    return states;
}

inline const std::vector<std::string> &case_i_labels() {
    static const std::vector<std::string> labels = {"uu", "ud", "du", "dd"};
    return labels;
}

inline const std::vector<std::string> &case_ii_labels() {
    static const std::vector<std::string> labels = {"singlet", "t+1", "t-1", "t0"};
    return labels;
}

inline Ensemble uniform_ensemble(const std::vector<StateVector> &states) {
    std::vector<EnsembleElement> els;
    for (const auto &s : states) els.push_back({1.0 / static_cast<double>(states.size()), s});
    return Ensemble(std::move(els));
}

inline Ensemble case_i_ensemble() {
    return uniform_ensemble(case_i_states());
}
inline Ensemble case_ii_ensemble() {
    return uniform_ensemble(case_ii_states());
}

inline PreparedPair prepare_case_i(Stream &rng) {
    std::size_t k = rng.below(4);
    return {k, case_i_states()[k]};
}

inline PreparedPair prepare_case_ii(Stream &rng) {
    std::size_t k = rng.below(4);
    return {k, case_ii_states()[k]};
}

/// singlet(c1, a) (x) singlet(c2, b), factor order (c1, a, c2, b).
inline StateVector prepare_quartet() {
    return tensor_product(singlet(), singlet());
}

inline constexpr std::size_t kCarol1 = 0, kAlice = 1, kCarol2 = 2, kBob = 3;

/// Carol's Case I read-out: her z-spins are opposite to her partners'.
inline std::pair<int, int> carol_case_i_predictions(std::pair<int, int> carol_z) {
    return {-carol_z.first, -carol_z.second};
}

inline std::array<double, 12> joint_distribution(const FableTranscript &t) {
    std::array<double, 12> d{};
    if (t.records.empty()) return d;
    for (const auto &r : t.records) {
        std::size_t cell = static_cast<std::size_t>(r.axis) * 4 + (r.alice_outcome > 0 ? 0 : 2) + (r.bob_outcome > 0 ? 0 : 1);
        d[cell] += 1;
    }
    for (auto &x : d) x /= static_cast<double>(t.records.size());
    return d;
}

/// Largest cell difference between the (axis, alice, bob) distributions of two runs.
inline double histogram_distance(const FableTranscript &a, const FableTranscript &b) {
    auto da = joint_distribution(a);
    auto db = joint_distribution(b);
    double worst = 0;
    for (std::size_t i = 0; i < da.size(); i++) worst = std::max(worst, std::abs(da[i] - db[i]));
    return worst;
}

/// Every claim statistic, computed from the transcript alone.
inline ClaimReport verify_claims(const FableTranscript &t) {
    ClaimReport r;
    r.n_pairs = t.records.size();
    const bool case_i = t.config.carol_strategy == CarolStrategy::CaseITrick;
    std::uint64_t zz = 0, zz_match = 0, zz_raw = 0, flagged = 0, flagged_anti = 0, anti = 0;
    std::array<std::uint64_t, 3> count{}, alice_up{}, bob_up{};
    std::array<std::array<std::uint64_t, 4>, 3> joint{};
    for (const auto &rec : t.records) {
        auto ax = static_cast<std::size_t>(rec.axis);
        count[ax]++;
        alice_up[ax] += rec.alice_outcome > 0;
        bob_up[ax] += rec.bob_outcome > 0;
        joint[ax][(rec.alice_outcome > 0 ? 0 : 2) + (rec.bob_outcome > 0 ? 0 : 1)]++;
        bool is_anti = rec.alice_outcome == -rec.bob_outcome;
        anti += is_anti;
        if (rec.axis == Axis::Z) {
            zz++;
            zz_match += rec.carol.predicted_alice == rec.alice_outcome && rec.carol.predicted_bob == rec.bob_outcome;
            zz_raw += rec.carol.raw_c1 == rec.alice_outcome && rec.carol.raw_c2 == rec.bob_outcome;
        }
        if (rec.carol.singlet_flag) {
            flagged++;
            flagged_anti += is_anti;
        }
    }
    r.zz_fraction = detail::ratio(zz, r.n_pairs);
    r.anticorrelated_fraction = detail::ratio(anti, r.n_pairs);
    if (case_i) {
        r.zz_prediction_match_rate = detail::ratio(zz_match, zz);
        if (t.config.preparation == Preparation::EntangledQuartet) {
            r.zz_raw_agreement_rate = detail::ratio(zz_raw, zz);
        }
    } else {
        r.flagged_fraction = detail::ratio(flagged, r.n_pairs);
        r.flagged_anticorrelation_rate = detail::ratio(flagged_anti, flagged);
        r.flagged_over_anticorrelated = detail::ratio(flagged, anti);
        if (t.config.ordering == Ordering::CarolLast) {
            r.carol_triplet_rejection_fraction = detail::ratio(r.n_pairs - flagged, r.n_pairs);
        }
    }
    for (std::size_t ax = 0; ax < 3; ax++) {
        auto &s = r.per_axis[ax];
        s.count = count[ax];
        if (count[ax] == 0) continue;
        std::array<double, 4> h{};
        for (std::size_t c = 0; c < 4; c++) h[c] = static_cast<double>(joint[ax][c]) / static_cast<double>(count[ax]);
        s.joint_histogram = h;
        s.alice_up_fraction = detail::ratio(alice_up[ax], count[ax]);
        s.bob_up_fraction = detail::ratio(bob_up[ax], count[ax]);
    }
    return r;
}

namespace detail {

struct FableKit {
    ProjectiveObservable carol_z_pair;
    ProjectiveObservable carol_total_spin_full;
    ProjectiveObservable carol_singlet_test;
    std::array<ProjectiveObservable, 3> spin;
};

inline FableKit make_fable_kit() {
    std::vector<Vector> zbasis, spin_basis;
    for (std::size_t i = 0; i < 4; i++) zbasis.push_back(basis_vector(4, i));
    for (const auto &s : case_ii_states()) spin_basis.push_back(s.amplitudes());
    Matrix ps = singlet().projector();
    return FableKit{
        ProjectiveObservable::from_basis(zbasis, case_i_labels()),
        ProjectiveObservable::from_basis(spin_basis, case_ii_labels()),
        ProjectiveObservable({{"singlet", 0.0, ps}, {"triplet", 1.0, Matrix::identity(4) - ps}}),
        {spin_observable(Axis::X), spin_observable(Axis::Y), spin_observable(Axis::Z)},
    };
}

}  // namespace detail

inline std::pair<FableTranscript, ClaimReport> run_fable(const FableConfig &cfg) {
    cfg.validate();
    const auto kit = detail::make_fable_kit();
    const StateVector quartet = prepare_quartet();
    const Stream master(cfg.seed);

    auto records = detail::simulate_pairs<RunRecord>(cfg.n_pairs, cfg.threads, [&](std::uint64_t id) {
        Stream rng = master.child(id);
        RunRecord rec;
        rec.pair_id = id;
        rec.axis = static_cast<Axis>(rng.below(3));
        const auto &spin = kit.spin[static_cast<std::size_t>(rec.axis)];

        if (cfg.preparation != Preparation::EntangledQuartet) {
            bool case_i = cfg.preparation == Preparation::DirectCaseI;
            PreparedPair prep = case_i ? prepare_case_i(rng) : prepare_case_ii(rng);
            if (case_i) {
                rec.carol.label = case_i_labels()[prep.label];
                rec.carol.predicted_alice = prep.label < 2 ? +1 : -1;
                rec.carol.predicted_bob = prep.label % 2 == 0 ? +1 : -1;
            } else {
                rec.carol.label = case_ii_labels()[prep.label];
                rec.carol.singlet_flag = prep.label == 0;
            }
            const std::size_t dims[] = {2, 2};
            const std::size_t a[] = {0};
            const std::size_t b[] = {1};
            auto ra = measure_subsystem(prep.state, dims, a, spin, rng);
            auto rb = measure_subsystem(ra.post_state, dims, b, spin, rng);
            rec.alice_outcome = detail::spin_sign(ra.index);
            rec.bob_outcome = detail::spin_sign(rb.index);
            return rec;
        }

        const std::size_t dims[] = {2, 2, 2, 2};
        const std::size_t carol[] = {kCarol1, kCarol2};
        const std::size_t a[] = {kAlice};
        const std::size_t b[] = {kBob};
        StateVector state = quartet;

        auto carol_measures = [&] {
            if (cfg.carol_strategy == CarolStrategy::CaseITrick) {
                auto rc = measure_subsystem(state, dims, carol, kit.carol_z_pair, rng);
                rec.carol.label = rc.label;
                rec.carol.raw_c1 = rc.index < 2 ? +1 : -1;
                rec.carol.raw_c2 = rc.index % 2 == 0 ? +1 : -1;
                auto [pa, pb] = carol_case_i_predictions({rec.carol.raw_c1, rec.carol.raw_c2});
                rec.carol.predicted_alice = pa;
                rec.carol.predicted_bob = pb;
                state = std::move(rc.post_state);
            } else {
                const auto &obs =
                    cfg.ordering == Ordering::CarolFirst ? kit.carol_total_spin_full : kit.carol_singlet_test;
                auto rc = measure_subsystem(state, dims, carol, obs, rng);
                rec.carol.label = rc.label;
                rec.carol.singlet_flag = rc.index == 0;
                state = std::move(rc.post_state);
            }
        };
        auto alice_bob_measure = [&] {
            auto ra = measure_subsystem(state, dims, a, spin, rng);
            auto rb = measure_subsystem(ra.post_state, dims, b, spin, rng);
            rec.alice_outcome = detail::spin_sign(ra.index);
            rec.bob_outcome = detail::spin_sign(rb.index);
            state = std::move(rb.post_state);
        };

        if (cfg.ordering == Ordering::CarolFirst) {
            carol_measures();
            alice_bob_measure();
        } else {
            alice_bob_measure();
            carol_measures();
        }
        return rec;
    });

    FableTranscript t{cfg, std::move(records)};
    ClaimReport report = verify_claims(t);
    return {std::move(t), std::move(report)};
}

// ===========================================================================
// Claim checks

/// One quantitative claim: `value` must equal `expected` within `tolerance`
/// (tolerance 0 means exact equality). A missing value fails.
struct Check {
    std::string name;
    std::optional<double> value;
    double expected;
    double tolerance;
    bool passed;
};

inline Check make_check(std::string name, std::optional<double> value, double expected, double tolerance) {
    bool ok = value.has_value() &&
              (tolerance == 0 ? *value == expected : std::abs(*value - expected) <= tolerance);
    return {std::move(name), value, expected, tolerance, ok};
}

inline std::vector<Check> fable_checks(const FableConfig &cfg, const ClaimReport &r, double stat_tol = 0.01) {
    std::vector<Check> out;
    out.push_back(make_check("zz_fraction", r.zz_fraction, 1.0 / 3, stat_tol));
    static const char *cells[] = {"++", "+-", "-+", "--"};
    for (std::size_t ax = 0; ax < 3; ax++) {
        std::string axis(axis_name(static_cast<Axis>(ax)));
        const auto &s = r.per_axis[ax];
        out.push_back(make_check("alice_up_fraction." + axis, s.alice_up_fraction, 0.5, stat_tol));
        out.push_back(make_check("bob_up_fraction." + axis, s.bob_up_fraction, 0.5, stat_tol));
        for (std::size_t c = 0; c < 4; c++) {
            std::optional<double> v;
            if (s.joint_histogram) v = (*s.joint_histogram)[c];
            out.push_back(make_check("joint_histogram." + axis + "." + cells[c], v, 0.25, stat_tol));
        }
    }
    if (cfg.carol_strategy == CarolStrategy::CaseITrick) {
        out.push_back(make_check("zz_prediction_match_rate", r.zz_prediction_match_rate, 1.0, 0.0));
    } else {
        out.push_back(make_check("flagged_anticorrelation_rate", r.flagged_anticorrelation_rate, 1.0, 0.0));
        out.push_back(make_check("flagged_fraction", r.flagged_fraction, 0.25, stat_tol));
        if (cfg.ordering == Ordering::CarolLast) {
            out.push_back(
                make_check("carol_triplet_rejection_fraction", r.carol_triplet_rejection_fraction, 0.75, stat_tol));
            out.push_back(make_check("flagged_over_anticorrelated", r.flagged_over_anticorrelated, 0.5, 2 * stat_tol));
        }
    }
    return out;
}

inline std::vector<Check> photon_checks(const PhotonTrickConfig &cfg, const PhotonReport &r, double stat_tol = 0.01,
                                        double tol = kDefaultTol) {
    std::vector<Check> out;
    out.push_back(make_check("match_rate", r.match_rate, 1.0, 0.0));
    Ensemble target = photon_target_ensemble(cfg.p, cfg.bob_basis);
    Matrix w = target.mixture();
    for (std::size_t k = 0; k < 2; k++) {
        std::string suffix = "." + std::to_string(k);
        out.push_back(make_check("subensemble_fraction" + suffix, r.subensemble_fraction[k], target[k].weight, stat_tol));
        const Vector &phi = target[k].state.amplitudes();
        double expected_pass = inner(phi, w * std::span<const Complex>(phi)).real();
        out.push_back(make_check("test_pass_rate" + suffix, r.test_pass_rate[k], expected_pass, stat_tol));
    }
    if (cfg.ordering == PhotonOrdering::BobFirst) {
        std::optional<double> deficit;
        if (r.min_conditional_overlap) deficit = 1.0 - *r.min_conditional_overlap;
        out.push_back(make_check("conditional_overlap_deficit", deficit, 0.0, tol));
    }
    return out;
}

inline bool all_passed(const std::vector<Check> &checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.passed; });
}

/// min over phase of ||(u (x) u (x) u (x) u)|Psi> - e^{i theta}|Psi>|| for the quartet state.
inline double rotational_invariance_check(const Matrix &u, double tol = kDefaultTol) {
    if (u.rows() != 2 || !is_unitary(u, tol)) {
        throw Error(ErrorCode::NotUnitary, "rotation must be a 2x2 unitary");
    }
    const StateVector quartet = prepare_quartet();
    const std::size_t dims[] = {2, 2, 2, 2};
    Vector v = quartet.amplitudes();
    for (std::size_t f = 0; f < 4; f++) {
        const std::size_t target[] = {f};
        v = apply_on_factors(u, v, dims, target);
    }
    Complex overlap = inner(quartet, v);
    Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1);
    return distance(v, scaled(quartet.amplitudes(), phase));
}

}  // namespace steerlab::protocols
