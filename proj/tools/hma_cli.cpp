// Command-line interface: evaluation of span valuations on structured convex
// functions, the verification battery, and density recovery. Input specs are
// JSON documents (schemas in docs/schema.md); reports are printed as tables
// and optionally written as CSV or JSON.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <iostream>

#include "hma/battery.hpp"
#include "hma/decomposition.hpp"
#include "hma/valuations.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

std::string route_name(hma::EvalRoute r) {
    using R = hma::EvalRoute;
    switch (r) {
        case R::ClosedFormCone: return "closed-form";
        case R::RadialSmooth: return "radial";
        case R::ConstantDensity: return "constant-density";
        case R::PvQuadrature: return "principal-value";
        case R::ProductSplit: return "product";
        case R::HyperplaneSurface: return "hyperplane-surface";
        case R::ZeroFunction: return "zero";
    }
    return "?";
}

void write_report(const std::vector<hma::CheckRow>& rows, const std::string& out,
                  const std::string& format) {
    if (out.empty()) return;
    std::ofstream of(out);
    if (format == "json")
        of << hma::battery_json(rows).dump(2) << "\n";
    else
        of << hma::battery_csv(rows);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hermitian Monge-Ampere valuations"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv", suite = "all";
    std::uint64_t seed = 20240809ull;
    double tolerance_scale = 1.0;
    bool inject_sign_error = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration");
        cmd->add_option("--out", out_path, "output path");
        cmd->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--seed", seed, "seed for all randomized checks");
        cmd->add_option("--tolerance-scale", tolerance_scale, "scale all tolerances");
    };

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a valuation on a function");
    add_common(eval_cmd);
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the verification battery");
    add_common(verify_cmd);
    verify_cmd->add_option("--suite", suite,
                           "transforms|operators|valuations|decomposition|all");
    verify_cmd->add_flag("--inject-sign-error", inject_sign_error,
                         "flip a reference sign (harness self-test)");
    CLI::App* recover_cmd = app.add_subcommand("recover", "recover densities of a span valuation");
    add_common(recover_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*eval_cmd) {
            const nlohmann::json cfg = load_json(config_path);
            const hma::ValuationSpec mu = hma::valuation_from_json(cfg.at("valuation"));
            const hma::ConvexFunctionSpec f = hma::convex_from_json(cfg.at("function"));
            try {
                const hma::EvalReport rep = hma::evaluate_report(mu, f);
                std::cout << "value    " << std::setprecision(12) << rep.value << "\n"
                          << "route    " << route_name(rep.route) << "\n"
                          << "scale    " << rep.scale << "\n";
                if (rep.pv) {
                    std::cout << "pv       " << rep.pv->diagnostic << " ("
                              << rep.pv->partials.size() << " shells)\n";
                }
                if (!out_path.empty()) {
                    nlohmann::json j;
                    j["value"] = rep.value;
                    j["route"] = route_name(rep.route);
                    std::ofstream(out_path) << j.dump(2) << "\n";
                }
                return 0;
            } catch (const hma::PvDivergenceError& e) {
                std::cerr << "principal value diverges: " << e.what() << "\n";
                std::cerr << "shell partials:";
                for (double p : e.report.partials) std::cerr << " " << p;
                std::cerr << "\n";
                return 3;
            }
        }
        if (*verify_cmd) {
            hma::BatteryOptions opts;
            opts.seed = seed;
            opts.tolerance_scale = tolerance_scale;
            opts.inject_sign_error = inject_sign_error;
            const auto rows = hma::run_suite(suite, opts);
            int failures = 0;
            std::printf("%-28s %-42s %12s %12s %6s %8s\n", "check", "anchor", "residual",
                        "tolerance", "state", "seconds");
            for (const auto& r : rows) {
                if (!r.pass) ++failures;
                std::printf("%-28s %-42s %12.3e %12.3e %6s %8.2f\n", r.check_id.c_str(),
                            r.anchor.c_str(), r.residual, r.tolerance,
                            r.pass ? "pass" : "FAIL", r.seconds);
            }
            write_report(rows, out_path, format);
            std::printf("%zu checks, %d failures\n", rows.size(), failures);
            return failures == 0 ? 0 : 1;
        }
        if (*recover_cmd) {
            const nlohmann::json cfg = load_json(config_path);
            const hma::ValuationSpec mu = hma::valuation_from_json(cfg.at("valuation"));
            if (mu.terms.empty()) {
                std::cout << "empty valuation, nothing to recover\n";
                return 0;
            }
            const int grid_n = cfg.value("grid_n", 513);
            std::set<int> qs;
            for (const auto& t : mu.terms) qs.insert(t.q);
            std::ostringstream csv;
            csv << "q,t,zeta,zeta_tilde\n";
            csv.precision(12);
            for (int q : qs) {
                try {
                    const hma::RecoveredDensities rec = hma::recover_densities_kq(mu, q, grid_n);
                    for (double t : rec.zeta.nodes()) {
                        csv << q << ',' << t << ',' << rec.zeta(t) << ',';
                        if (rec.zeta_tilde) csv << (*rec.zeta_tilde)(t);
                        csv << '\n';
                    }
                    // sup-norm deltas against declared inputs, when provided
                    if (cfg.contains("declared")) {
                        for (const auto& dj : cfg["declared"]) {
                            if (dj.at("q").get<int>() != q) continue;
                            const hma::WeightFunction want =
                                hma::weight_from_json(dj.at("weight"));
                            const bool tilde = dj.value("tag", "T") == "Y";
                            double sup = 0.0;
                            for (int i = 1; i <= 64; ++i) {
                                const double t = 0.1 + 0.9 * i / 64.0;
                                const double got = tilde
                                                       ? (rec.zeta_tilde ? (*rec.zeta_tilde)(t)
                                                                         : 0.0)
                                                       : rec.zeta(t);
                                sup = std::max(sup, std::abs(got - want(t)));
                            }
                            std::cout << "q=" << q << (tilde ? " (singular part)" : "")
                                      << " sup-delta " << sup << "\n";
                        }
                    }
                } catch (const hma::ClassificationViolationError& e) {
                    std::cerr << "classification violation at q=" << q << ": " << e.what()
                              << "\n";
                    return 4;
                }
            }
            if (!out_path.empty()) std::ofstream(out_path) << csv.str();
            else std::cout << csv.str();
            return 0;
        }
    } catch (const hma::UnsupportedFunctionError& e) {
        std::cerr << "unsupported input: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "malformed config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
