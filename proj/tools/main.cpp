#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "polyprob/checks.hpp"
#include "polyprob/io.hpp"
#include "polyprob/polyprob.hpp"

namespace {

using namespace polyprob;

int exit_code_for(ErrorCode c)
{
    switch (c) {
        case ErrorCode::ParseError:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::ZeroNormal:
        case ErrorCode::NonFiniteEntry:
        case ErrorCode::InvalidConfig:
        case ErrorCode::IndexOutOfRange:
        case ErrorCode::NotOnHyperplane:
            return 2;
        case ErrorCode::NoApplicableMethod:
        case ErrorCode::UnboundedPolyhedron:
        case ErrorCode::GeneralPositionFailure:
        case ErrorCode::NotSquare:
        case ErrorCode::SingularNormals:
        case ErrorCode::ZeroDiagonal:
        case ErrorCode::EmptyPolyhedron:
        case ErrorCode::DimensionTooLarge:
            return 3;
        case ErrorCode::SingularGram:
        case ErrorCode::LpNumericalFailure:
        case ErrorCode::StepUnderflow:
        case ErrorCode::MaxStepsExceeded:
            return 4;
    }
    return 4;
}

[[nodiscard]] int report_error(const Error& e)
{
    nlohmann::json j;
    j["error"]["code"] = error_code_name(e.code());
    j["error"]["message"] = e.what();
    std::cerr << j.dump() << '\n';
    return exit_code_for(e.code());
}

Method parse_method(const std::string& s)
{
    if (s == "auto") return Method::Auto;
    if (s == "bounded") return Method::Bounded;
    if (s == "cone") return Method::Cone;
    fail(ErrorCode::ParseError, "unknown method '" + s + "'");
}

int thread_cap()
{
    long v = 0;
    if (const char* env = std::getenv("HGM_THREADS")) v = std::strtol(env, nullptr, 10);
    if (v <= 0) v = static_cast<long>(std::thread::hardware_concurrency());
    return static_cast<int>(std::max(1L, v));
}

int cmd_prob(const std::string& path, const std::string& method, const SolverConfig& cfg)
{
    try {
        const HalfspaceSystem sys = load_system_file(path);
        const HgmResult res = probability(sys, parse_method(method), cfg);
        std::cout << result_to_json(res).dump(2) << '\n';
        return 0;
    } catch (const Error& e) {
        return report_error(e);
    }
}

struct TableRow {
    int d = 0;
    bool ok = false;
    double hgm = 0.0, hgm_time = 0.0, mc = 0.0, mc_se = 0.0;
    std::vector<std::string> flags;
    std::string error;
};

std::string row_value(double v)
{
    char buf[40];
    if (v != 0.0 && std::abs(v) < 1e-3)
        std::snprintf(buf, sizeof buf, "%.4e", v);
    else
        std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

int cmd_table(Family fam, int d_max, long long samples, std::uint64_t seed,
              const std::string& format, const SolverConfig& cfg, bool quiet)
{
    const int d_min = 2;
    std::vector<TableRow> rows(static_cast<std::size_t>(d_max - d_min + 1));
    std::atomic<int> next{0};
    const int nrows = static_cast<int>(rows.size());

    auto worker = [&] {
        for (int i = next.fetch_add(1); i < nrows; i = next.fetch_add(1)) {
            TableRow& row = rows[static_cast<std::size_t>(i)];
            row.d = d_min + i;
            try {
                const HalfspaceSystem sys = make_family(fam, row.d);
                const HgmResult res = probability(sys, Method::Auto, cfg);
                const McEstimate mc = mc_probability(sys, samples, seed + static_cast<std::uint64_t>(row.d));
                row.ok = true;
                row.hgm = res.probability;
                row.hgm_time = res.wall_time_s;
                row.mc = mc.mean;
                row.mc_se = mc.std_error;
                row.flags = res.flags;
            } catch (const Error& e) {
                row.error = std::string(error_code_name(e.code())) + ": " + e.what();
            }
        }
    };
    const int nthreads = std::min(thread_cap(), nrows);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (format == "csv") {
        std::cout << "d,hgm,hgm_time_s,mc,mc_std_error\n";
        for (const TableRow& r : rows) {
            if (!r.ok) {
                std::cout << r.d << ",error,," << r.error << ",\n";
                continue;
            }
            std::cout << r.d << ',' << format_double(r.hgm) << ',' << format_double(r.hgm_time)
                      << ',' << format_double(r.mc) << ',' << format_double(r.mc_se) << '\n';
        }
    } else if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const TableRow& r : rows) {
            nlohmann::json j;
            j["d"] = r.d;
            if (r.ok) {
                j["hgm"] = r.hgm;
                j["hgm_time_s"] = r.hgm_time;
                j["mc"] = r.mc;
                j["mc_std_error"] = r.mc_se;
                j["flags"] = r.flags;
            } else {
                j["error"] = r.error;
            }
            arr.push_back(std::move(j));
        }
        std::cout << arr.dump(2) << '\n';
    } else {
        if (!quiet)
            std::cout << "family " << family_letter(fam) << ", " << samples << " MC samples, seed "
                      << seed << "\n\n";
        std::cout << "|  d | HGM       | time (s) | MC        | MC std err |\n"
                     "|---:|-----------|---------:|-----------|-----------:|\n";
        char buf[160];
        for (const TableRow& r : rows) {
            if (!r.ok) {
                std::snprintf(buf, sizeof buf, "| %2d | failed: %s |\n", r.d, r.error.c_str());
                std::cout << buf;
                continue;
            }
            std::snprintf(buf, sizeof buf, "| %2d | %s | %8.3f | %s | %10.1e |\n", r.d,
                          row_value(r.hgm).c_str(), r.hgm_time, row_value(r.mc).c_str(), r.mc_se);
            std::cout << buf;
        }
    }
    return 0;
}

int cmd_check(const CheckSuiteConfig& cfg, bool quiet)
{
    const std::vector<CheckResult> results = run_check_suites(cfg);
    long failed = 0;
    for (const CheckResult& r : results) {
        if (!r.pass) ++failed;
        if (!quiet || !r.pass) std::cout << format_check_line(r) << '\n';
    }
    std::cout << (failed == 0 ? "all " + std::to_string(results.size()) + " suites passed"
                              : std::to_string(failed) + " of " + std::to_string(results.size()) +
                                    " suites FAILED")
              << '\n';
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gaussian probability content of polyhedra via Pfaffian ODE homotopies"};
    app.require_subcommand(1);

    std::string method = "auto";
    std::string format = "md";
    std::string family_name = "P";
    std::string input_path;
    SolverConfig scfg;
    long long samples = 1000000;
    std::uint64_t seed = 1;
    int d_max_table = 10;
    int d_max_check = 5;
    double perturb = 0.0;
    bool quiet = false;

    app.add_flag("--quiet", quiet, "suppress informational output");

    CLI::App* prob = app.add_subcommand("prob", "probability of a system from a JSON/CSV file");
    prob->add_option("input", input_path, "system file")->required();
    prob->add_option("--method", method, "auto|bounded|cone")->default_str("auto");
    prob->add_option("--rel-tol", scfg.rel_tol, "relative step tolerance");
    prob->add_option("--abs-tol", scfg.abs_tol, "absolute step tolerance");

    CLI::App* table = app.add_subcommand("table", "benchmark family sweep with MC column");
    table->add_option("--family", family_name, "P|Q|C")->default_str("P");
    table->add_option("--d-max", d_max_table, "largest dimension")->check(CLI::Range(2, 12));
    table->add_option("--samples", samples, "MC sample count");
    table->add_option("--seed", seed, "MC seed (row d uses seed+d)");
    table->add_option("--format", format, "md|csv|json")->check(CLI::IsMember({"md", "csv", "json"}));
    table->add_option("--rel-tol", scfg.rel_tol, "relative step tolerance");
    table->add_option("--abs-tol", scfg.abs_tol, "absolute step tolerance");

    CLI::App* check = app.add_subcommand("check", "run the verification suites");
    check->add_option("--d-max", d_max_check, "largest dimension exercised")->check(CLI::Range(2, 12));
    check->add_option("--perturb", perturb, "coefficient noise magnitude for identity suites");
    check->add_option("--seed", seed, "suite seed");
    check->add_option("--samples", samples, "MC sample count for oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (prob->parsed()) return cmd_prob(input_path, method, scfg);
        if (table->parsed()) {
            Family fam;
            if (family_name == "P") fam = Family::P;
            else if (family_name == "Q") fam = Family::Q;
            else if (family_name == "C") fam = Family::C;
            else fail(ErrorCode::ParseError, "unknown family '" + family_name + "'");
            return cmd_table(fam, d_max_table, samples, seed, format, scfg, quiet);
        }
        CheckSuiteConfig ccfg;
        ccfg.d_max = d_max_check;
        ccfg.perturb = perturb;
        ccfg.seed = seed;
        ccfg.mc_samples = samples;
        return cmd_check(ccfg, quiet);
    } catch (const Error& e) {
        return report_error(e);
    }
}
