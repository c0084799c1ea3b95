// Command-line front end: muscle, hill, simulate, bench, score-test, fetch.

#include <CLI11.hpp>

#include "muscle/cli.hpp"

namespace {

muscle::HeaderPolicy parse_header(const std::string& value) {
    if (value == "auto") return muscle::HeaderPolicy::Auto;
    if (value == "yes") return muscle::HeaderPolicy::Header;
    if (value == "no") return muscle::HeaderPolicy::NoHeader;
    throw CLI::ValidationError("--header must be auto, yes or no");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse clustering of multivariate extremes"};
    app.require_subcommand(1);

    // muscle
    muscle::RunConfig run_cfg;
    std::string run_header = "auto";
    auto* cmd_run = app.add_subcommand("muscle", "Detect extremal clusters in a dataset");
    cmd_run->add_option("--input", run_cfg.input, "CSV input file");
    cmd_run->add_option("--preset", run_cfg.preset,
                        "independence | max-mixture | wind | financial");
    cmd_run->add_option("--header", run_header, "Header handling: auto | yes | no");
    cmd_run->add_option("--dim", run_cfg.dim, "Generator dimension");
    cmd_run->add_option("--n", run_cfg.n, "Generator sample size");
    cmd_run->add_option("--rho", run_cfg.rho, "Gaussian copula correlation");
    cmd_run->add_option("--alpha-logistic", run_cfg.alpha_logistic, "Logistic dependence");
    cmd_run->add_flag("--abs", run_cfg.abs_value, "Componentwise absolute value first");
    double alpha_opt = 0.0;
    auto* alpha_flag = cmd_run->add_option("--alpha", alpha_opt, "Power-transform exponent");
    long long hill_k_opt = 0;
    auto* hill_flag =
        cmd_run->add_option("--hill-k", hill_k_opt, "Estimate the exponent at this Hill order");
    cmd_run->add_option("--kmin-frac", run_cfg.kmin_frac, "Lower level fraction");
    cmd_run->add_option("--kmax-frac", run_cfg.kmax_frac, "Upper level fraction");
    cmd_run->add_option("--grid-points", run_cfg.grid_points, "Level grid resolution");
    cmd_run->add_option("--seed", run_cfg.seed, "Generator seed");
    cmd_run->add_option("--out", run_cfg.out_dir, "Output directory");
    cmd_run->add_option("--cache-dir", run_cfg.cache_dir, "Dataset cache directory");
    cmd_run->add_flag("--fetch", run_cfg.allow_network, "Allow downloading preset datasets");

    // hill
    muscle::HillConfig hill_cfg;
    std::string hill_header = "auto";
    auto* cmd_hill = app.add_subcommand("hill", "Tail-index curve of the norm sample");
    cmd_hill->add_option("--input", hill_cfg.input, "CSV input file")->required();
    cmd_hill->add_option("--header", hill_header, "Header handling: auto | yes | no");
    cmd_hill->add_flag("--abs", hill_cfg.abs_value, "Componentwise absolute value first");
    cmd_hill->add_option("--kmin", hill_cfg.kmin, "Smallest order");
    cmd_hill->add_option("--kmax", hill_cfg.kmax, "Largest order (0: n)");
    cmd_hill->add_option("--step", hill_cfg.step, "Order step");
    cmd_hill->add_option("--out", hill_cfg.out_dir, "Output directory");

    // simulate
    muscle::SimulateConfig sim_cfg;
    auto* cmd_sim = app.add_subcommand("simulate", "Draw synthetic samples and references");
    cmd_sim->add_option("--preset", sim_cfg.preset, "independence | max-mixture");
    cmd_sim->add_option("--dim", sim_cfg.dim, "Dimension (independence only)");
    cmd_sim->add_option("--n", sim_cfg.n, "Rows to draw");
    cmd_sim->add_option("--rho", sim_cfg.rho, "Gaussian copula correlation");
    cmd_sim->add_option("--alpha-logistic", sim_cfg.alpha_logistic, "Logistic dependence");
    cmd_sim->add_option("--seed", sim_cfg.seed, "Seed");
    cmd_sim->add_option("--out", sim_cfg.out, "Sample CSV path");
    cmd_sim->add_option("--pstar-out", sim_cfg.pstar_out, "Reference fixture path");
    cmd_sim->add_option("--pstar-keep", sim_cfg.pstar_keep, "Reference exceedances to keep");
    cmd_sim->add_option("--pstar-oversample", sim_cfg.pstar_oversample,
                        "Draws per kept exceedance");

    // bench
    muscle::BenchConfig bench_cfg;
    std::string rho_list, alpha_list, kind_name = "independence";
    auto* cmd_bench = app.add_subcommand("bench", "Replication experiments");
    cmd_bench->add_option("--preset", bench_cfg.preset,
                          "desk-independence | desk-max-mixture | paper-independence | "
                          "paper-max-mixture");
    cmd_bench->add_option("--kind", kind_name, "independence | max-mixture");
    cmd_bench->add_option("--dim", bench_cfg.experiment.dim, "Dimension");
    cmd_bench->add_option("--rho-grid", rho_list, "Comma-separated correlations");
    cmd_bench->add_option("--alpha-grid", alpha_list, "Comma-separated dependences");
    cmd_bench->add_option("--n", bench_cfg.experiment.n, "Sample size per replication");
    cmd_bench->add_option("--replications", bench_cfg.experiment.replications, "Replications");
    cmd_bench->add_option("--kmin-frac", bench_cfg.experiment.grid.kmin_frac, "Lower fraction");
    cmd_bench->add_option("--kmax-frac", bench_cfg.experiment.grid.kmax_frac, "Upper fraction");
    cmd_bench->add_option("--grid-points", bench_cfg.experiment.grid.points, "Grid points");
    cmd_bench->add_option("--seed", bench_cfg.experiment.master_seed, "Master seed");
    cmd_bench->add_option("--fixture", bench_cfg.fixture, "Reference fixture JSON");
    cmd_bench->add_option("--mc-keep", bench_cfg.experiment.mc_keep,
                          "Monte-Carlo reference exceedances");
    cmd_bench->add_option("--out", bench_cfg.out_dir, "Output directory");

    // score-test
    muscle::ScoreTestConfig score_cfg;
    std::string score_header = "auto";
    auto* cmd_score = app.add_subcommand("score-test", "Equality test for a cluster-count block");
    cmd_score->add_option("--input", score_cfg.input, "CSV input file")->required();
    cmd_score->add_option("--header", score_header, "Header handling: auto | yes | no");
    cmd_score->add_flag("--abs", score_cfg.abs_value, "Componentwise absolute value first");
    cmd_score->add_option("--k", score_cfg.k, "Exceedance level")->required();
    cmd_score->add_option("--s1", score_cfg.s1, "Block start (sorted rank)")->required();
    cmd_score->add_option("--s2", score_cfg.s2, "Block end (sorted rank)")->required();
    cmd_score->add_option("--level", score_cfg.level, "Test level");
    cmd_score->add_option("--out", score_cfg.out, "Optional JSON output path");

    // fetch
    muscle::FetchConfig fetch_cfg;
    auto* cmd_fetch = app.add_subcommand("fetch", "Download and cache a named dataset");
    cmd_fetch->add_option("--name", fetch_cfg.name, "wind-speed | industry-portfolios")
        ->required();
    cmd_fetch->add_option("--cache-dir", fetch_cfg.cache_dir, "Cache directory");
    cmd_fetch->add_flag("--yes", fetch_cfg.allow_network, "Consent to network access");
    cmd_fetch->add_option("--sha256", fetch_cfg.sha256, "Expected content digest");
    cmd_fetch->add_option("--base-url", fetch_cfg.base_url, "Alternative download origin");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            run_cfg.header = parse_header(run_header);
            if (*alpha_flag) run_cfg.alpha = alpha_opt;
            if (*hill_flag) run_cfg.hill_k = hill_k_opt;
            return muscle::cmd_muscle(run_cfg);
        }
        if (cmd_hill->parsed()) {
            hill_cfg.header = parse_header(hill_header);
            return muscle::cmd_hill(hill_cfg);
        }
        if (cmd_sim->parsed()) return muscle::cmd_simulate(sim_cfg);
        if (cmd_bench->parsed()) {
            const auto parse_list = [](const std::string& text) {
                std::vector<double> out;
                std::stringstream ss(text);
                std::string tok;
                while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
                return out;
            };
            if (bench_cfg.preset.empty()) {
                bench_cfg.experiment.kind = kind_name == "max-mixture"
                                                ? muscle::GeneratorSpec::Kind::MaxMixture
                                                : muscle::GeneratorSpec::Kind::GaussianCopulaPareto;
                if (!rho_list.empty()) bench_cfg.experiment.rho_grid = parse_list(rho_list);
                if (!alpha_list.empty()) bench_cfg.experiment.alpha_grid = parse_list(alpha_list);
                bench_cfg.experiment.reference_mode =
                    bench_cfg.experiment.kind == muscle::GeneratorSpec::Kind::MaxMixture
                        ? muscle::ReferenceMode::MonteCarlo
                        : muscle::ReferenceMode::Axes;
            }
            return muscle::cmd_bench(bench_cfg);
        }
        if (cmd_score->parsed()) {
            score_cfg.header = parse_header(score_header);
            return muscle::cmd_score_test(score_cfg);
        }
        if (cmd_fetch->parsed()) return muscle::cmd_fetch(fetch_cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
