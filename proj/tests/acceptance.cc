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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "planted.h"
#include "steerlab/ghjw.hpp"
#include "steerlab/identities.hpp"
#include "steerlab/protocols.hpp"

namespace {

using namespace steerlab;
using namespace steerlab::protocols;
namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool within(std::optional<double> x, double lo, double hi) {
    return x && *x >= lo && *x <= hi;
}

struct Gate {
    int failures = 0;

    void report(int id, const std::string &title, bool ok, const std::string &detail) {
        std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
        std::fflush(stdout);
        failures += !ok;
    }
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

FableConfig fable(Preparation prep, CarolStrategy s, Ordering o, std::uint64_t seed = 2026) {
    FableConfig c;
    c.n_pairs = 100000;
    c.seed = seed;
    c.preparation = prep;
    c.carol_strategy = s;
    c.ordering = o;
    return c;
}

struct TimedFable {
    FableTranscript transcript;
    ClaimReport report;
    double seconds;
};

TimedFable timed(const FableConfig &cfg) {
    auto t0 = Clock::now();
    auto [t, r] = run_fable(cfg);
    return {std::move(t), r, seconds_since(t0)};
}

void identities_gate(Gate &g) {
    auto t0 = Clock::now();
    auto results = identities::run_identity_suite(1e-9, 0);
    double secs = seconds_since(t0);
    bool ok = secs < 1.0;
    double worst = 0;
    for (const auto &r : results) {
        ok = ok && r.passed && r.max_residual <= 1e-9;
        worst = std::max(worst, r.max_residual);
    }
    g.report(1, "identity suite", ok,
             fmt("%zu identities, max residual %.2e, %.3f s", results.size(), worst, secs));
}

Vector apply_bob(const Matrix &u, const ghjw::Purification &psi) {
    const std::size_t dims[] = {psi.dim_alice, psi.dim_bob};
    const std::size_t bob[] = {1};
    return apply_on_factors(u, psi.joint, dims, bob);
}

void ghjw_gate(Gate &g) {
    auto t0 = Clock::now();
    Stream rng(31337);
    double worst_relation = 0, worst_unitarity = 0, worst_prob = 0, worst_overlap = 0;
    int bad = 0;
    for (int trial = 0; trial < 200; trial++) {
        std::size_t da = 2 + rng.below(3);
        std::size_t db = 2 + rng.below(5);
        std::size_t k1 = 1 + rng.below(db);
        std::size_t k2 = 1 + rng.below(db);
        auto spectrum = testing::random_spectrum(da, std::min(k1, k2), trial % 3, rng);
        Matrix basis = random_unitary(da, rng);
        try {
            Ensemble source = testing::planted_ensemble(spectrum, k1, rng, nullptr, &basis);
            Ensemble target = testing::planted_ensemble(spectrum, k2, rng, nullptr, &basis);
            auto psi = ghjw::purify_from_ensemble(source, db);
            ghjw::Purification psi_prime(StateVector(apply_bob(random_unitary(db, rng), psi)), da, db);
            Matrix u = ghjw::relating_unitary(psi, psi_prime);
            worst_relation = std::max(worst_relation, distance(psi.joint, apply_bob(u, psi_prime)));
            worst_unitarity = std::max(worst_unitarity, (u.adjoint() * u - Matrix::identity(db)).frobenius_norm());

            auto plan = ghjw::steering_observable(psi, target);
            for (const auto &row : ghjw::analyze_plan(psi, plan)) {
                if (!row.target_weight) continue;
                worst_prob = std::max(worst_prob, std::abs(row.probability - *row.target_weight));
                worst_overlap = std::max(worst_overlap, row.overlap ? 1 - *row.overlap : 1.0);
            }
        } catch (const std::exception &e) {
            std::printf("  trial %d raised: %s\n", trial, e.what());
            bad++;
        }
    }
    double secs = seconds_since(t0);
    bool ok = bad == 0 && worst_relation <= 1e-8 && worst_unitarity <= 1e-9 && worst_prob <= 1e-9 &&
              worst_overlap <= 1e-9 && secs < 10;
    g.report(2, "relating unitary and steering exactness", ok,
             fmt("200 instances, |Psi-(I(x)U)Psi'| %.1e, unitarity %.1e, |prob-weight| %.1e, 1-overlap %.1e, "
                 "%.2f s",
                 worst_relation, worst_unitarity, worst_prob, worst_overlap, secs));
}

void photon_gate(Gate &g) {
    bool ok = true;
    std::string detail;
    for (auto basis : {PhotonBasis::HV, PhotonBasis::Diagonal}) {
        for (auto ordering : {PhotonOrdering::BobFirst, PhotonOrdering::AliceFirst}) {
            PhotonTrickConfig cfg;
            cfg.n_pairs = 100000;
            cfg.seed = 70;
            cfg.p = 0.7;
            cfg.bob_basis = basis;
            cfg.ordering = ordering;
            auto t0 = Clock::now();
            auto [t, r] = run_photon_trick(cfg);
            double secs = seconds_since(t0);
            bool hv = basis == PhotonBasis::HV;
            double lo = hv ? 0.69 : 0.49, hi = hv ? 0.71 : 0.51;
            bool run_ok = r.match_rate == 1.0 && within(r.subensemble_fraction[0], lo, hi) && secs < 5;
            ok = ok && run_ok;
            detail += fmt("%s/%s match %.6f %s-freq %.4f %.2f s; ", std::string(photon_basis_name(basis)).c_str(),
                          std::string(photon_ordering_name(ordering)).c_str(), r.match_rate.value_or(-1),
                          hv ? "H" : "D", r.subensemble_fraction[0].value_or(-1), secs);
        }
    }
    g.report(3, "photon trick at p = 0.7", ok, detail);
}

}  // namespace

int main() {
    Gate g;
    identities_gate(g);
    ghjw_gate(g);
    photon_gate(g);

    using P = Preparation;
    using S = CarolStrategy;
    using O = Ordering;
    std::map<std::string, TimedFable> runs;
    auto key = [](const FableConfig &c) {
        return std::string(preparation_name(c.preparation)) + "/" + std::string(strategy_name(c.carol_strategy)) +
               "/" + std::string(ordering_name(c.ordering));
    };
    const std::vector<FableConfig> configs = {
        fable(P::EntangledQuartet, S::CaseITrick, O::CarolFirst),  fable(P::EntangledQuartet, S::CaseITrick, O::CarolLast, 4051),
        fable(P::EntangledQuartet, S::CaseIITrick, O::CarolFirst), fable(P::EntangledQuartet, S::CaseIITrick, O::CarolLast, 4051),
        fable(P::DirectCaseI, S::CaseITrick, O::CarolFirst),       fable(P::DirectCaseII, S::CaseIITrick, O::CarolFirst)};
    for (const auto &c : configs) runs.emplace(key(c), timed(c));

    // 4: stated fractions.
    {
        bool ok = true;
        std::string detail;
        for (const auto &[name, run] : runs) {
            ok = ok && run.seconds < 10 && within(run.report.zz_fraction, 0.323, 0.343);
            detail += fmt("%s zz %.4f %.2f s; ", name.c_str(), run.report.zz_fraction.value_or(-1), run.seconds);
        }
        const auto &last = runs.at("quartet/case2/last").report;
        const auto &first = runs.at("quartet/case2/first").report;
        ok = ok && within(last.flagged_fraction, 0.24, 0.26) &&
             within(last.carol_triplet_rejection_fraction, 0.74, 0.76) && within(first.flagged_fraction, 0.24, 0.26);
        detail += fmt("carol-last singlet %.4f rejection %.4f; carol-first singlet %.4f",
                      last.flagged_fraction.value_or(-1), last.carol_triplet_rejection_fraction.value_or(-1),
                      first.flagged_fraction.value_or(-1));
        g.report(4, "fable fractions", ok, detail);
    }

    // 5: exact identification.
    {
        bool ok = true;
        std::string detail;
        for (const auto &[name, run] : runs) {
            const auto &r = run.report;
            bool case_i = run.transcript.config.carol_strategy == S::CaseITrick;
            auto v = case_i ? r.zz_prediction_match_rate : r.flagged_anticorrelation_rate;
            ok = ok && v == std::optional<double>(1.0);
            detail += fmt("%s %s %.6f; ", name.c_str(), case_i ? "zz match" : "flagged anti", v.value_or(-1));
        }
        g.report(5, "exact identification", ok, detail);
    }

    // 6: indistinguishability.
    {
        bool ok = true;
        double worst = 0;
        for (const auto &[name, run] : runs) {
            for (const auto &axis : run.report.per_axis) {
                if (!axis.joint_histogram) {
                    ok = false;
                    continue;
                }
                for (double h : *axis.joint_histogram) worst = std::max(worst, std::abs(h - 0.25));
            }
        }
        double d1 = histogram_distance(runs.at("quartet/case1/first").transcript,
                                       runs.at("quartet/case1/last").transcript);
        double d2 = histogram_distance(runs.at("quartet/case2/first").transcript,
                                       runs.at("quartet/case2/last").transcript);
        ok = ok && worst <= 0.01 && d1 <= 0.01 && d2 <= 0.01;
        g.report(6, "indistinguishability", ok,
                 fmt("max |histogram - 1/4| %.4f over %zu runs; first-vs-last distance case1 %.4f case2 %.4f", worst,
                     runs.size(), d1, d2));
    }

    // 7: rotational invariance.
    {
        Stream rng(777);
        double worst = 0;
        for (int i = 0; i < 100; i++) worst = std::max(worst, rotational_invariance_check(random_unitary(2, rng)));
        g.report(7, "rotational invariance", worst <= 1e-8, fmt("100 random unitaries, max residual %.2e", worst));
    }

    // 8: CLI determinism.
    {
        fs::path dir = fs::temp_directory_path() / ("steerlab_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        const std::string data = STEERLAB_DATA_DIR;
        const std::vector<std::string> commands = {
            "verify --format json",
            "ghjw --config " + data + "/photon_ensembles.json",
            "ghjw --config " + data + "/malformed_weights.json",
            "photon-trick --p 0.7 --basis diagonal --seed 3 --format csv",
            "photon-trick --p 0.7 --basis hv --ordering alice-first --seed 3",
            "fable --prep quartet --strategy case2 --ordering last --seed 1",
            "fable --prep quartet --strategy case1 --ordering first --seed 1 --format csv",
        };
        auto slurp = [](const fs::path &p) {
            std::ifstream f(p, std::ios::binary);
            std::ostringstream s;
            s << f.rdbuf();
            return s.str();
        };
        bool ok = true;
        std::size_t bytes = 0;
        for (std::size_t i = 0; i < commands.size(); i++) {
            std::string outs[2];
            int status[2];
            for (int rep = 0; rep < 2; rep++) {
                fs::path out = dir / ("run" + std::to_string(rep));
                std::string cmd = std::string(STEERLAB_CLI_PATH) + " " + commands[i] + " --out " + out.string() +
                                  " 2>/dev/null";
                int raw = std::system(cmd.c_str());
                status[rep] = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
                outs[rep] = slurp(out);
            }
            bool same = status[0] == status[1] && status[0] != 2 && !outs[0].empty() && outs[0] == outs[1];
            if (!same) std::printf("  differs: %s\n", commands[i].c_str());
            ok = ok && same;
            bytes += outs[0].size();
        }
        fs::remove_all(dir);
        g.report(8, "CLI determinism", ok, fmt("%zu commands run twice, %zu bytes compared", commands.size(), bytes));
    }

    std::printf("%s: %d criteria failed\n", g.failures ? "FAIL" : "PASS", g.failures);
    return g.failures ? 1 : 0;
}
