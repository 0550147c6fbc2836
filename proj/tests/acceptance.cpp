// Acceptance suite: runs every acceptance criterion end to end and prints
// one pass/fail line per criterion. Exits non-zero if any criterion fails.
//
// The heavyweight criteria drive the real CLI binary as a child process
// (generate -> sweep over the 100k-series population) and time/measure it
// with wait4(); the million-series single-curve case runs in-process.

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/helpers.hpp"
#include "unitrace/dataset.hpp"
#include "unitrace/degrade.hpp"
#include "unitrace/engine.hpp"
#include "unitrace/report.hpp"
#include "unitrace/stats.hpp"
#include "unitrace/synth.hpp"

using namespace unitrace;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct ChildResult {
    int exit_code = -1;
    double seconds = 0.0;
    long max_rss_kb = 0;
};

// fork/exec the CLI, silencing its stdout; wall time and the child's peak
// RSS come from wait4().
ChildResult run_child(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    const auto start = std::chrono::steady_clock::now();
    const pid_t pid = fork();
    if (pid == 0) {
        std::FILE* devnull = std::fopen("/dev/null", "w");
        if (devnull) dup2(fileno(devnull), STDOUT_FILENO);
        execv(argv[0], argv.data());
        _exit(127);
    }
    ChildResult result;
    int status = 0;
    struct rusage usage {};
    wait4(pid, &status, 0, &usage);
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.max_rss_kb = usage.ru_maxrss;
    return result;
}

std::map<std::size_t, double> parse_sweep_means(const fs::path& path) {
    std::map<std::size_t, double> means;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string k, mean;
        std::getline(fields, k, ',');
        std::getline(fields, mean, ',');
        means[std::stoul(k)] = std::stod(mean);
    }
    return means;
}

// ---------------------------------------------------------------------------
// Criteria 1, 2, 5: randomized corpus, oracle equivalence and entropy checks.
// ---------------------------------------------------------------------------
void run_corpus_criteria() {
    SplitMix64 rng(0x0AC5E97A11CE);
    const int datasets = 1000;

    std::size_t windows = 0;
    std::size_t c1_bad = 0, c2_bad = 0, c5_bad = 0;
    const auto start = std::chrono::steady_clock::now();

    for (int i = 0; i < datasets; ++i) {
        const Dataset d = random_dataset(rng, 200, 50, 0.10);
        const std::size_t m = d.timestamp_count();
        for (std::size_t k = 1; k <= std::min<std::size_t>(7, m); ++k) {
            for (int order_val = 0; order_val <= 3; ++order_val) {
                const RoundingOrder order(order_val);
                const std::size_t t = rng.next_below(m - k + 1);
                ++windows;

                const WindowUniqueness fast = uniqueness_at(d, {t, k}, order);
                const WindowUniqueness brute = brute_force_uniqueness(d, {t, k}, order);
                const bool same = fast.included_count == brute.included_count &&
                                  fast.unique_count == brute.unique_count &&
                                  fast.u == brute.u && fast.unique_ids == brute.unique_ids;
                if (!same) ++c1_bad;

                const WindowEntropy e = entropy_at(d, {t, k}, order);
                const auto direct = entropy_oracle(d, {t, k}, order);
                if (e.e.has_value() != direct.has_value()) {
                    ++c2_bad;
                } else if (e.e) {
                    if (std::abs(*e.e - *direct) > 1e-9) ++c2_bad;
                    if (e.class_count == 1 && std::abs(*e.e) > 1e-12) ++c2_bad;
                    if (e.class_count == e.included_count &&
                        std::abs(*e.e - std::log2(double(e.included_count))) > 1e-12)
                        ++c2_bad;
                }

                if (fast.u && e.e) {
                    const double full = std::log2(static_cast<double>(fast.included_count));
                    const bool u_says = *fast.u == 1.0;
                    const bool e_says = std::abs(*e.e - full) <= 1e-9;
                    if (u_says != e_says) ++c5_bad;
                }
            }
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    report(1, "oracle equivalence (uniqueness_at vs brute force)", c1_bad == 0 && seconds < 60.0,
           std::to_string(datasets) + " datasets, " + std::to_string(windows) + " windows, " +
               std::to_string(c1_bad) + " mismatches, " + fmt(seconds) + " s");
    report(2, "entropy matches direct multiset evaluation", c2_bad == 0,
           std::to_string(windows) + " windows, tol 1e-9 (boundaries 1e-12), " +
               std::to_string(c2_bad) + " violations");
    report(5, "u=1 iff e=log2(included) at every window", c5_bad == 0,
           std::to_string(c5_bad) + " violations");
}

// ---------------------------------------------------------------------------
// Criterion 3: rounding agrees with the committed reference table.
// ---------------------------------------------------------------------------
void run_round_table_criterion() {
    std::ifstream in(std::string(UNITRACE_FIXTURE_DIR) + "/round_reference.csv");
    if (!in.good()) {
        report(3, "round_order vs reference table", false, "fixture missing");
        return;
    }
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0, bad = 0;
    while (std::getline(in, line)) {
        const char* p = line.c_str();
        char* end = nullptr;
        const unsigned long v = std::strtoul(p, &end, 10);
        const unsigned long order = std::strtoul(end + 1, &end, 10);
        const unsigned long expected = std::strtoul(end + 1, &end, 10);
        ++rows;
        if (round_order(static_cast<std::uint32_t>(v),
                        RoundingOrder(static_cast<int>(order))) != expected)
            ++bad;
    }
    report(3, "round_order vs reference table", rows == 144004 && bad == 0,
           std::to_string(rows) + " entries ([0,36000] x orders 0-3), " + std::to_string(bad) +
               " mismatches, zero tolerance");
}

// ---------------------------------------------------------------------------
// Criterion 4: monotonicity properties, 500 random cases each.
// ---------------------------------------------------------------------------
void run_monotonicity_criteria() {
    SplitMix64 rng(0x5151AB0);
    std::size_t a_bad = 0, b_bad = 0, c_bad = 0;
    const int cases = 500;

    for (int i = 0; i < cases; ++i) {
        // (a) complete data: unique ids at k stay unique at k+1
        {
            const Dataset d = random_dataset(rng, 120, 20, 0.0);
            const std::size_t m = d.timestamp_count();
            if (m >= 2) {
                const std::size_t k = 1 + rng.next_below(std::min<std::size_t>(6, m - 1));
                const std::size_t t = rng.next_below(m - k);
                const auto narrow = uniqueness_at(d, {t, k}, RoundingOrder(0)).unique_ids;
                const auto wide = uniqueness_at(d, {t, k + 1}, RoundingOrder(0)).unique_ids;
                const std::set<std::string> wide_set(wide.begin(), wide.end());
                for (const auto& id : narrow)
                    if (!wide_set.count(id)) ++a_bad;
            }
        }
        // (b) unique ids at order r are unique ids at order 0
        {
            const Dataset d = random_dataset(rng, 120, 20, 0.10);
            const std::size_t m = d.timestamp_count();
            const std::size_t k = 1 + rng.next_below(std::min<std::size_t>(7, m));
            const std::size_t t = rng.next_below(m - k + 1);
            const RoundingOrder order(static_cast<int>(1 + rng.next_below(3)));
            const auto raw = uniqueness_at(d, {t, k}, RoundingOrder(0)).unique_ids;
            const auto deg = uniqueness_at(d, {t, k}, order).unique_ids;
            const std::set<std::string> raw_set(raw.begin(), raw.end());
            for (const auto& id : deg)
                if (!raw_set.count(id)) ++b_bad;
        }
        // (c) a series unique in the full dataset stays unique in any subset
        {
            const Dataset d = random_dataset(rng, 100, 16, 0.10);
            if (d.series_count() >= 2) {
                const std::size_t m = d.timestamp_count();
                const std::size_t k = 1 + rng.next_below(std::min<std::size_t>(7, m));
                const std::size_t t = rng.next_below(m - k + 1);
                const RoundingOrder order(static_cast<int>(rng.next_below(4)));
                std::vector<std::string> keep;
                for (const auto& id : d.series_ids())
                    if (rng.next_unit() < 0.4) keep.push_back(id);
                if (keep.empty()) keep.push_back(d.series_ids().front());
                const Dataset sub = subsample(d, keep);
                const std::set<std::string> kept(keep.begin(), keep.end());
                const auto full_ids = uniqueness_at(d, {t, k}, order).unique_ids;
                const auto sub_ids = uniqueness_at(sub, {t, k}, order).unique_ids;
                const std::set<std::string> sub_set(sub_ids.begin(), sub_ids.end());
                for (const auto& id : full_ids)
                    if (kept.count(id) && !sub_set.count(id)) ++c_bad;
            }
        }
    }
    report(4, "monotonicity properties (k / rounding / subsampling)",
           a_bad == 0 && b_bad == 0 && c_bad == 0,
           std::to_string(cases) + " cases each; violations: k=" + std::to_string(a_bad) +
               ", rounding=" + std::to_string(b_bad) + ", subsample=" + std::to_string(c_bad));
}

// ---------------------------------------------------------------------------
// Criteria 6, 7, 8, 9, 10: calibrated populations and the CLI pipeline.
// ---------------------------------------------------------------------------
void run_calibrated_criteria(const fs::path& work) {
    const std::string cli = UNITRACE_CLI_PATH;
    const fs::path medium_csv = work / "medium.csv";
    const fs::path sweep_dir = work / "sweep";

    // Build the medium preset population through the real CLI.
    const ChildResult gen = run_child({cli, "generate", "--preset", "medium", "--out",
                                       medium_csv.string()});
    if (gen.exit_code != 0) {
        report(6, "trend reproduction on the medium preset", false, "generate failed");
        report(7, "subsampling raises mean uniqueness", false, "generate failed");
        report(8, "medium preset calibration", false, "generate failed");
        report(9, "thread-count determinism of audit", false, "generate failed");
        report(10, "sweep performance envelope", false, "generate failed");
        return;
    }
    std::fprintf(stderr, "# medium preset generated in %.1f s (%.0f MB)\n", gen.seconds,
                 static_cast<double>(fs::file_size(medium_csv)) / 1e6);

    // Criterion 10a: full k x order sweep through the CLI, timed and
    // memory-measured.
    const ChildResult sweep = run_child({cli, "sweep", medium_csv.string(), "--k", "1-7",
                                         "--round", "0,1,2,3", "--out", sweep_dir.string()});
    const double sweep_gb = static_cast<double>(sweep.max_rss_kb) / (1024.0 * 1024.0);
    const bool sweep_ok = sweep.exit_code == 0 && sweep.seconds < 300.0 && sweep_gb < 4.0;

    // Criterion 6: Fig-1 shape on the order-0 sweep.
    bool c6 = sweep.exit_code == 0;
    std::string c6_detail = "sweep failed";
    std::map<int, std::map<std::size_t, double>> means;
    if (sweep.exit_code == 0) {
        for (int order = 0; order <= 3; ++order)
            means[order] =
                parse_sweep_means(sweep_dir / ("sweep_order" + std::to_string(order) + ".csv"));
        bool increasing = true;
        for (std::size_t k = 2; k <= 7; ++k)
            if (!(means[0][k] > means[0][k - 1])) increasing = false;
        bool above = false;
        for (std::size_t k = 1; k <= 7; ++k)
            if (means[0][k] > 0.9) above = true;
        bool decreasing = true;
        for (int order = 1; order <= 3; ++order)
            if (!(means[order][7] < means[order - 1][7])) decreasing = false;
        c6 = increasing && above && decreasing;
        c6_detail = "mean_u(k=1..7, order 0): ";
        for (std::size_t k = 1; k <= 7; ++k) c6_detail += fmt(means[0][k]) + " ";
        c6_detail += "| k=7 by order: " + fmt(means[0][7]) + " " + fmt(means[1][7]) + " " +
                     fmt(means[2][7]) + " " + fmt(means[3][7]);
    }
    report(6, "trend reproduction on the medium preset", c6, c6_detail);

    // Criteria 7 and 8 reuse the same population in-process.
    {
        const Dataset medium = load_long_csv(medium_csv);

        const SummaryStats stats = summary(medium);
        const bool c8 = std::abs(stats.mean - 725.0) <= 50.0 &&
                        std::abs(stats.stddev - 950.0) <= 200.0 && stats.zero_fraction >= 0.03 &&
                        stats.zero_fraction <= 0.10;
        report(8, "medium preset calibration", c8,
               "mean=" + fmt(stats.mean) + " W (725 +/- 50), std=" + fmt(stats.stddev) +
                   " W (950 +/- 200), zero_fraction=" + fmt(stats.zero_fraction) +
                   " ([0.03, 0.10])");

        bool c7 = sweep.exit_code == 0;
        std::string c7_detail = "sweep failed";
        if (c7) {
            SplitMix64 rng(0x5AB5A3B1E);
            std::vector<std::string> ids = medium.series_ids();
            for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
                const std::size_t j = i + rng.next_below(ids.size() - i);
                std::swap(ids[i], ids[j]);
            }
            ids.resize(medium.series_count() / 10);
            const Dataset sub = subsample(medium, ids);

            const std::vector<std::size_t> ks{1, 2, 3, 4, 5, 6, 7};
            const std::vector<int> orders{0, 1, 2, 3};
            const std::vector<GridCell> sub_grid = run_grid(sub, ks, orders, false, {});
            std::size_t violations = 0;
            double worst = 0.0;
            for (const GridCell& cell : sub_grid) {
                const double full_mean = means[cell.order][cell.k];
                const double sub_mean = cell.uniqueness.mean_u.value_or(-1.0);
                if (!(sub_mean >= full_mean)) {
                    ++violations;
                    worst = std::max(worst, full_mean - sub_mean);
                }
            }
            c7 = violations == 0;
            c7_detail = "28 (k, order) settings, " + std::to_string(violations) + " violations";
            if (violations > 0) c7_detail += ", worst gap " + fmt(worst);
        }
        report(7, "subsampling raises mean uniqueness", c7, c7_detail);
    }

    // Criterion 9: byte-identical audits across thread counts.
    {
        const fs::path small_csv = work / "small.csv";
        run_child({cli, "generate", "--preset", "small", "--n", "2000", "--m", "96", "--out",
                   small_csv.string()});
        const fs::path out1 = work / "audit_t1";
        const fs::path out8 = work / "audit_t8";
        const ChildResult a1 = run_child({cli, "audit", small_csv.string(), "--k", "1,3,5",
                                          "--round", "0,2", "--entropy", "--threads", "1",
                                          "--out", out1.string()});
        const ChildResult a8 = run_child({cli, "audit", small_csv.string(), "--k", "1,3,5",
                                          "--round", "0,2", "--entropy", "--threads", "8",
                                          "--out", out8.string()});
        bool c9 = a1.exit_code == 0 && a8.exit_code == 0;
        std::string detail = "audit failed";
        if (c9) {
            nlohmann::json r1 = nlohmann::json::parse(read_text(out1 / "report.json"));
            nlohmann::json r8 = nlohmann::json::parse(read_text(out8 / "report.json"));
            r1.erase("timing");
            r8.erase("timing");
            const bool reports_equal = r1.dump() == r8.dump();
            const bool csvs_equal = read_text(out1 / "uniqueness_k5_order0.csv") ==
                                        read_text(out8 / "uniqueness_k5_order0.csv") &&
                                    read_text(out1 / "entropy_k3_order2.csv") ==
                                        read_text(out8 / "entropy_k3_order2.csv");
            c9 = reports_equal && csvs_equal;
            detail = std::string("reports ") + (reports_equal ? "identical" : "DIFFER") +
                     " outside timing, per-window CSVs " + (csvs_equal ? "identical" : "DIFFER");
        }
        report(9, "thread-count determinism of audit", c9, detail);
    }

    // Criterion 10: the sweep envelope measured above, plus the large preset
    // at (k=5, order 0) in-process.
    {
        const auto gen_start = std::chrono::steady_clock::now();
        const Dataset large = generate(default_calibrated_config(PresetScale::large));
        const double gen_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - gen_start).count();

        const auto curve_start = std::chrono::steady_clock::now();
        const UniquenessResult curve = uniqueness_curve(large, 5, RoundingOrder(0));
        const double curve_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - curve_start).count();

        const bool c10 = sweep_ok && curve_seconds < 600.0 && curve.per_t.size() == 332;
        report(10, "sweep performance envelope", c10,
               "100k sweep: " + fmt(sweep.seconds) + " s (< 300), peak " + fmt(sweep_gb) +
                   " GB (< 4); 1M curve k=5: " + fmt(curve_seconds) + " s (< 600, gen " +
                   fmt(gen_seconds) + " s), mean_u=" + fmt(curve.mean_u.value_or(-1)));
    }
}

}  // namespace

int main() {
    std::printf("unitrace acceptance suite\n");
    const auto work = scratch_dir("acceptance");

    run_corpus_criteria();
    run_round_table_criterion();
    run_monotonicity_criteria();
    run_calibrated_criteria(work);

    std::error_code ec;
    fs::remove_all(work, ec);

    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
