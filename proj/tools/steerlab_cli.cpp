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

// Command-line front end. Exit status: 0 success, 1 a claim or identity
// failed, 2 bad usage, configuration or I/O.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "steerlab/identities.hpp"
#include "steerlab/protocols.hpp"
#include "steerlab/report.hpp"

namespace {

using namespace steerlab;

constexpr int kOk = 0;
constexpr int kClaimFailure = 1;
constexpr int kUsage = 2;

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
    double tol = kDefaultTol;
    double stat_tol = 0.01;
};

void add_common(CLI::App *sub, Common &c, std::vector<std::string> formats) {
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    sub->add_option("--out", c.out, "Output path (default: stdout)");
    sub->add_option("--format", c.format, "Output format (default: " + formats.front() + ")")
        ->check(CLI::IsMember(formats));
    sub->parse_complete_callback([&c, def = formats.front()] {
        if (c.format.empty()) c.format = def;
    });
    sub->add_option("--tol", c.tol, "Numerical tolerance")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_stat_tol(CLI::App *sub, Common &c) {
    sub->add_option("--stat-tol", c.stat_tol, "Absolute bound on statistical claims")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
}

const CLI::Validator kOpenUnit(
    [](std::string &s) -> std::string {
        double x = 0;
        if (!CLI::detail::lexical_cast(s, x)) return "not a number: " + s;
        return x > 0 && x < 1 ? "" : "must lie strictly between 0 and 1";
    },
    "(0,1)");

/// Writes `text` to `path`, or to stdout when the path is empty.
void emit(const std::string &path, const std::string &text) {
    if (path.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("failed writing " + path);
}

std::string dump(const report::Json &j) {
    return j.dump(2) + "\n";
}

std::string read_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int run_verify(const Common &c, double perturbation) {
    auto results = identities::run_identity_suite(c.tol, c.seed, perturbation);
    bool ok = std::all_of(results.begin(), results.end(), [](const auto &r) { return r.passed; });
    if (c.format == "json") {
        emit(c.out, dump(report::verify_report_json(results, c.seed, c.tol, perturbation)));
    } else {
        std::string text;
        char line[256];
        std::size_t failed = 0;
        for (const auto &r : results) {
            failed += !r.passed;
            std::snprintf(line, sizeof line, "%s %-34s cases=%-4zu max_residual=%.3e\n", r.passed ? "PASS" : "FAIL",
                          r.name.c_str(), r.cases, r.max_residual);
            text += line;
        }
        std::snprintf(line, sizeof line, "%zu/%zu identities hold at tol %.3g (steerlab %s)\n",
                      results.size() - failed, results.size(), c.tol, kVersion);
        text += line;
        emit(c.out, text);
    }
    return ok ? kOk : kClaimFailure;
}

int run_ghjw(const Common &c, const std::string &config_path) {
    report::GhjwConfig cfg = report::parse_ghjw_config(read_file(config_path));
    report::GhjwRun run = report::certify_config(cfg, c.tol);
    emit(c.out, dump(report::ghjw_report_json(cfg, run, config_path, c.tol)));
    return run.report.all_certified() ? kOk : kClaimFailure;
}

int run_photon(const Common &c, protocols::PhotonTrickConfig cfg, const std::string &transcript_path) {
    cfg.seed = c.seed;
    auto [transcript, rep] = protocols::run_photon_trick(cfg);
    auto checks = protocols::photon_checks(cfg, rep, c.stat_tol, c.tol);
    std::ostringstream csv;
    if (c.format == "csv" || !transcript_path.empty()) report::write_photon_csv(csv, transcript);
    if (!transcript_path.empty()) emit(transcript_path, csv.str());
    emit(c.out, c.format == "csv" ? csv.str() : dump(report::photon_report_json(cfg, rep, checks, c.stat_tol, c.tol)));
    return protocols::all_passed(checks) ? kOk : kClaimFailure;
}

int run_fable(const Common &c, protocols::FableConfig cfg, const std::string &transcript_path) {
    cfg.seed = c.seed;
    auto [transcript, rep] = protocols::run_fable(cfg);
    auto checks = protocols::fable_checks(cfg, rep, c.stat_tol);
    std::ostringstream csv;
    if (c.format == "csv" || !transcript_path.empty()) report::write_fable_csv(csv, transcript);
    if (!transcript_path.empty()) emit(transcript_path, csv.str());
    emit(c.out, c.format == "csv" ? csv.str() : dump(report::fable_report_json(cfg, rep, checks, c.stat_tol)));
    return protocols::all_passed(checks) ? kOk : kClaimFailure;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"steerlab: remote ensemble preparation, certified and simulated"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Common common;
    double perturbation = 0;
    auto *verify = app.add_subcommand("verify", "Check the closed-form identities");
    add_common(verify, common, {"text", "json"});
    verify->add_option("--perturb", perturbation, "Shift analytic constants (self-test)")->group("");

    std::string config_path;
    auto *ghjw_cmd = app.add_subcommand("ghjw", "Certify candidate ensembles and build Bob's steering measurements");
    add_common(ghjw_cmd, common, {"json"});
    ghjw_cmd->add_option("--config", config_path, "Ensemble file")->required()->check(CLI::ExistingFile);

    const std::map<std::string, protocols::PhotonBasis> bases = {{"hv", protocols::PhotonBasis::HV},
                                                                 {"diagonal", protocols::PhotonBasis::Diagonal}};
    const std::map<std::string, protocols::PhotonOrdering> photon_orders = {
        {"bob-first", protocols::PhotonOrdering::BobFirst}, {"alice-first", protocols::PhotonOrdering::AliceFirst}};
    protocols::PhotonTrickConfig photon;
    std::string transcript_path;
    auto *photon_cmd = app.add_subcommand("photon-trick", "Simulate Bob sorting Alice's photons");
    add_common(photon_cmd, common, {"json", "csv"});
    add_stat_tol(photon_cmd, common);
    photon_cmd->add_option("--p", photon.p, "Weight of H in Alice's density matrix")
        ->check(kOpenUnit)
        ->capture_default_str();
    photon_cmd->add_option("--basis", photon.bob_basis, "Ensemble Bob realizes: hv or diagonal")
        ->transform(CLI::CheckedTransformer(bases))
        ->capture_default_str();
    photon_cmd->add_option("--ordering", photon.ordering, "Who measures first")
        ->transform(CLI::CheckedTransformer(photon_orders))
        ->capture_default_str();
    photon_cmd->add_option("--pairs", photon.n_pairs, "Number of photon pairs")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}))
        ->capture_default_str();
    photon_cmd->add_option("--threads", photon.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    photon_cmd->add_option("--transcript", transcript_path, "Also write the CSV transcript here");

    const std::map<std::string, protocols::Preparation> preps = {
        {"direct1", protocols::Preparation::DirectCaseI},
        {"direct2", protocols::Preparation::DirectCaseII},
        {"quartet", protocols::Preparation::EntangledQuartet}};
    const std::map<std::string, protocols::CarolStrategy> strategies = {
        {"case1", protocols::CarolStrategy::CaseITrick}, {"case2", protocols::CarolStrategy::CaseIITrick}};
    const std::map<std::string, protocols::Ordering> orders = {{"first", protocols::Ordering::CarolFirst},
                                                              {"last", protocols::Ordering::CarolLast}};
    protocols::FableConfig fable;
    auto *fable_cmd = app.add_subcommand("fable", "Simulate Alice, Bob and Carol");
    add_common(fable_cmd, common, {"json", "csv"});
    add_stat_tol(fable_cmd, common);
    fable_cmd->add_option("--prep", fable.preparation, "Preparation: direct1, direct2 or quartet")
        ->transform(CLI::CheckedTransformer(preps))
        ->capture_default_str();
    fable_cmd->add_option("--strategy", fable.carol_strategy, "Carol's measurement: case1 or case2")
        ->transform(CLI::CheckedTransformer(strategies))
        ->capture_default_str();
    fable_cmd->add_option("--ordering", fable.ordering, "Carol measures first or last")
        ->transform(CLI::CheckedTransformer(orders))
        ->capture_default_str();
    fable_cmd->add_option("--pairs", fable.n_pairs, "Number of pairs")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}))
        ->capture_default_str();
    fable_cmd->add_option("--threads", fable.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    fable_cmd->add_option("--transcript", transcript_path, "Also write the CSV transcript here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*verify) return run_verify(common, perturbation);
        if (*ghjw_cmd) return run_ghjw(common, config_path);
        if (*photon_cmd) return run_photon(common, photon, transcript_path);
        if (*fable_cmd) return run_fable(common, fable, transcript_path);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
