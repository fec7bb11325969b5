// loodiag: command-line influence diagnostics for linear regression.
// Subcommands: diagnose, decompose, check-chisq, simulate, list-datasets.
// Exit codes: 0 success, 2 input/usage error, 3 numerical failure.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <loodiag/loodiag.hpp>

namespace {

using namespace loodiag;

struct OutputSpec {
    std::string format = "table";  // table | json | csv
    int precision = 3;
    std::string sort = "index";  // index | k_abs_desc | cook_desc
};

std::string fmt(double x, int precision) { return format_fixed(x, precision); }

std::string fmt_sci(double x, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", precision, x);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

void print_aligned(std::ostream& os, const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) return;
    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) os << "  ";
            os << std::string(width[c] - row[c].size(), ' ') << row[c];
        }
        os << "\n";
    }
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool is_builtin(const std::string& input) {
    const std::string l = lower(input);
    for (const std::string& n : builtin_names())
        if (n == l) return true;
    return false;
}

Dataset resolve_input(const std::string& input, const std::string& response, bool intercept) {
    if (is_builtin(input)) {
        Dataset ds = builtin(input);
        ds.intercept = intercept;
        return ds;
    }
    if (response.empty()) {
        throw Error("--response is required for CSV input (name or 1-based column index)");
    }
    return load_csv(input, response, intercept);
}

// ---------------------------------------------------------------------------
// diagnose

int cmd_diagnose(const Dataset& ds, const OutputSpec& out) {
    const RegressionFit f = fit(design_matrix(ds), ds.y);
    const DiagnosticsTable t = diagnostics_table(f);

    std::vector<std::size_t> order;
    if (out.sort == "k_abs_desc") {
        order = t.order_by_abs_k;
    } else if (out.sort == "cook_desc") {
        order = t.order_by_cook;
    } else {
        order.resize(f.n);
        for (std::size_t i = 0; i < f.n; ++i) order[i] = i + 1;
    }
    const std::size_t argmax_abs_k = t.order_by_abs_k.front();
    const std::size_t argmax_cook = t.order_by_cook.front();
    const int prec = out.precision;

    if (out.format == "json") {
        std::ostringstream os;
        os << "{\"dataset\":\"" << json_escape(ds.name) << "\",\"n\":" << f.n << ",\"p\":" << f.p
           << ",\"rows\":[";
        for (std::size_t k = 0; k < order.size(); ++k) {
            const DiagnosticsRow& r = t.rows[order[k] - 1];
            if (k > 0) os << ",";
            os << "{\"i\":" << r.i << ",\"e\":" << fmt(r.e, prec) << ",\"h\":" << fmt(r.h, prec)
               << ",\"t2\":" << fmt(r.t2, prec) << ",\"cook_d\":" << fmt(r.cook_d, prec)
               << ",\"k\":" << fmt(r.k, prec) << "}";
        }
        os << "],\"argmax_abs_k\":" << argmax_abs_k << ",\"argmax_cook\":" << argmax_cook << "}";
        std::cout << os.str() << "\n";
        return 0;
    }

    if (out.format == "csv") {
        std::cout << "i,e,h,t2,cook_d,k\n";
        for (std::size_t idx : order) {
            const DiagnosticsRow& r = t.rows[idx - 1];
            std::cout << r.i << "," << fmt(r.e, prec) << "," << fmt(r.h, prec) << ","
                      << fmt(r.t2, prec) << "," << fmt(r.cook_d, prec) << "," << fmt(r.k, prec)
                      << "\n";
        }
        std::cout << "argmax_abs_k," << argmax_abs_k << "\n";
        std::cout << "argmax_cook," << argmax_cook << "\n";
        return 0;
    }

    std::cout << "dataset: " << ds.name << " (n=" << f.n << ", p=" << f.p << ")\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"i", "e", "h", "t2", "cook_d", "k"});
    for (std::size_t idx : order) {
        const DiagnosticsRow& r = t.rows[idx - 1];
        rows.push_back({std::to_string(r.i), fmt(r.e, prec), fmt(r.h, prec), fmt(r.t2, prec),
                        fmt(r.cook_d, prec), fmt(r.k, prec)});
    }
    print_aligned(std::cout, rows);
    std::cout << "argmax |K|: observation " << argmax_abs_k << "\n";
    std::cout << "argmax D: observation " << argmax_cook << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// decompose

int cmd_decompose(const Dataset& ds, std::size_t i, const OutputSpec& out) {
    const RegressionFit f = fit(design_matrix(ds), ds.y);
    const CookDecomposition cd = cook_decomposition(f, i);
    const double d = cooks_distance(f, i);
    double sum = 0.0;
    for (double c : cd.components) sum += c;
    const int prec = out.precision;

    if (out.format == "json") {
        std::ostringstream os;
        os << "{\"dataset\":\"" << json_escape(ds.name) << "\",\"i\":" << i << ",\"p\":" << f.p
           << ",\"axes\":[";
        for (std::size_t k = 0; k < f.p; ++k) {
            if (k > 0) os << ",";
            os << "{\"k\":" << k + 1 << ",\"eigenvalue\":" << fmt(cd.eigen.eigenvalues[k], prec)
               << ",\"coord\":" << fmt(cd.coords[k], prec)
               << ",\"component\":" << fmt(cd.components[k], prec) << "}";
        }
        os << "],\"component_sum\":" << fmt(sum, prec) << ",\"cook_d\":" << fmt(d, prec) << "}";
        std::cout << os.str() << "\n";
        return 0;
    }

    if (out.format == "csv") {
        std::cout << "k,eigenvalue,coord,component\n";
        for (std::size_t k = 0; k < f.p; ++k) {
            std::cout << k + 1 << "," << fmt(cd.eigen.eigenvalues[k], prec) << ","
                      << fmt(cd.coords[k], prec) << "," << fmt(cd.components[k], prec) << "\n";
        }
        std::cout << "sum,,," << fmt(sum, prec) << "\n";
        return 0;
    }

    std::cout << "dataset: " << ds.name << ", observation " << i << " (p=" << f.p << ")\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"k", "eigenvalue", "coord", "component"});
    for (std::size_t k = 0; k < f.p; ++k) {
        rows.push_back({std::to_string(k + 1), fmt(cd.eigen.eigenvalues[k], prec),
                        fmt(cd.coords[k], prec), fmt(cd.components[k], prec)});
    }
    print_aligned(std::cout, rows);
    std::cout << "component sum: " << fmt(sum, prec) << "\n";
    std::cout << "cook distance: " << fmt(d, prec) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// check-chisq

int render_conditions(const std::string& label, const RegressionFit& f,
                      const std::vector<std::size_t>& indices, const OutputSpec& out) {
    const int prec = out.precision;
    std::vector<ChiSquareCondition> conds;
    conds.reserve(indices.size());
    for (std::size_t i : indices) conds.push_back(chi_square_condition(f, i));

    if (out.format == "json") {
        std::ostringstream os;
        os << "{\"dataset\":\"" << json_escape(label) << "\",\"rows\":[";
        for (std::size_t k = 0; k < conds.size(); ++k) {
            const ChiSquareCondition& c = conds[k];
            if (k > 0) os << ",";
            os << "{\"i\":" << c.i << ",\"h\":" << fmt(c.h, prec)
               << ",\"trace\":" << fmt(c.trace_value, prec)
               << ",\"condition1_residual\":" << fmt_sci(c.condition1_residual, prec)
               << ",\"satisfied\":" << (c.satisfied ? "true" : "false") << "}";
        }
        os << "]}";
        std::cout << os.str() << "\n";
        return 0;
    }

    if (out.format == "csv") {
        std::cout << "i,h,trace,condition1_residual,satisfied\n";
        for (const ChiSquareCondition& c : conds) {
            std::cout << c.i << "," << fmt(c.h, prec) << "," << fmt(c.trace_value, prec) << ","
                      << fmt_sci(c.condition1_residual, prec) << ","
                      << (c.satisfied ? "true" : "false") << "\n";
        }
        return 0;
    }

    std::cout << "dataset: " << label << "\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"i", "h", "trace", "cond1_residual", "satisfied"});
    for (const ChiSquareCondition& c : conds) {
        rows.push_back({std::to_string(c.i), fmt(c.h, prec), fmt(c.trace_value, prec),
                        fmt_sci(c.condition1_residual, prec), c.satisfied ? "true" : "false"});
    }
    print_aligned(std::cout, rows);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(double leverage, std::size_t samples, std::uint64_t seed, int precision) {
    const Vector q = simulate_quadratic_form(leverage, samples, seed);
    double mean = 0.0;
    for (double v : q) mean += v;
    mean /= static_cast<double>(q.size());
    const MonteCarloResult r = ks_test_chisq1(q, seed);

    const char* verdict = r.p_value > 0.01 ? "PASS" : (r.p_value < 1e-6 ? "REJECT" : "INCONCLUSIVE");
    std::cout << "leverage:  " << fmt(leverage, precision) << "\n";
    std::cout << "samples:   " << samples << "\n";
    std::cout << "seed:      " << seed << "\n";
    std::cout << "mean:      " << fmt(mean, precision) << "\n";
    std::cout << "expected:  " << fmt(leverage / (1.0 - leverage), precision) << "\n";
    std::cout << "ks:        " << fmt(r.ks_statistic, precision) << "\n";
    std::cout << "p_value:   " << fmt_sci(r.p_value, precision) << "\n";
    std::cout << "reference: " << r.reference << "\n";
    std::cout << "verdict:   " << verdict << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int fail(int code, const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const RankDeficientError& e) {
        return fail(3, e);
    } catch (const LeverageOneError& e) {
        return fail(3, e);
    } catch (const DegenerateResidualError& e) {
        return fail(3, e);
    } catch (const ZeroVarianceError& e) {
        return fail(3, e);
    } catch (const NonConvergenceError& e) {
        return fail(3, e);
    } catch (const SingularTransformError& e) {
        return fail(3, e);
    } catch (const NotSymmetricError& e) {
        return fail(3, e);
    } catch (const Error& e) {
        return fail(2, e);
    } catch (const std::exception& e) {
        return fail(2, e);
    }
}

}  // namespace

int main(int argc, char* argv[]) {
    CLI::App app{"Leave-one-out influence diagnostics for linear regression"};
    app.require_subcommand(1);

    std::string input, response;
    bool no_intercept = false;
    OutputSpec out;
    std::size_t obs_index = 0;
    double leverage = 0.0;
    std::size_t samples = 100000;
    std::uint64_t seed = 0;

    const auto add_io = [&](CLI::App* cmd, bool with_sort) {
        cmd->add_option("--response", response,
                        "response column (name or 1-based index) for CSV input");
        cmd->add_flag("--no-intercept", no_intercept, "do not prepend a ones column");
        cmd->add_option("--format", out.format, "output format")
            ->check(CLI::IsMember({"table", "json", "csv"}));
        cmd->add_option("--precision", out.precision, "decimal places (1..12)")
            ->check(CLI::Range(1, 12));
        if (with_sort) {
            cmd->add_option("--sort", out.sort, "row order")
                ->check(CLI::IsMember({"index", "k_abs_desc", "cook_desc"}));
        }
    };

    CLI::App* diagnose = app.add_subcommand("diagnose", "per-observation influence table");
    diagnose->add_option("input", input, "builtin dataset name or CSV path")->required();
    add_io(diagnose, true);

    CLI::App* decompose =
        app.add_subcommand("decompose", "split Cook's distance along the eigenvectors of X^T X");
    decompose->add_option("input", input, "builtin dataset name or CSV path")->required();
    decompose->add_option("i", obs_index, "observation index (1-based)")->required();
    add_io(decompose, false);

    CLI::App* check =
        app.add_subcommand("check-chisq", "evaluate the chi-squared quadratic-form conditions");
    check->add_option("input", input, "builtin dataset name or CSV path");
    CLI::Option* lev_opt = check->add_option("--leverage", leverage, "synthetic design leverage");
    add_io(check, false);

    CLI::App* simulate =
        app.add_subcommand("simulate", "Monte Carlo of the deletion quadratic form vs chi-squared(1)");
    simulate->add_option("--leverage", leverage, "leverage in (0,1)")->required();
    simulate->add_option("--samples", samples, "number of draws");
    simulate->add_option("--seed", seed, "random seed");
    simulate->add_option("--precision", out.precision, "decimal places (1..12)")
        ->check(CLI::Range(1, 12));

    CLI::App* list = app.add_subcommand("list-datasets", "bundled datasets");
    (void)list;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (diagnose->parsed()) {
        return guarded([&] {
            return cmd_diagnose(resolve_input(input, response, !no_intercept), out);
        });
    }
    if (decompose->parsed()) {
        return guarded([&] {
            return cmd_decompose(resolve_input(input, response, !no_intercept), obs_index, out);
        });
    }
    if (check->parsed()) {
        return guarded([&] {
            const bool have_leverage = lev_opt->count() > 0;
            if (have_leverage == !input.empty()) {
                throw Error("check-chisq needs exactly one of <input> or --leverage");
            }
            if (have_leverage) {
                const RegressionFit f = synthetic_leverage_fit(leverage);
                std::ostringstream label;
                label << "synthetic (leverage " << fmt(leverage, out.precision) << ")";
                return render_conditions(label.str(), f, {1}, out);
            }
            const Dataset ds = resolve_input(input, response, !no_intercept);
            const RegressionFit f = fit(design_matrix(ds), ds.y);
            std::vector<std::size_t> all(f.n);
            for (std::size_t i = 0; i < f.n; ++i) all[i] = i + 1;
            return render_conditions(ds.name, f, all, out);
        });
    }
    if (simulate->parsed()) {
        return guarded([&] { return cmd_simulate(leverage, samples, seed, out.precision); });
    }
    // list-datasets
    return guarded([&] {
        std::size_t name_width = 0;
        for (const std::string& name : builtin_names()) name_width = std::max(name_width, name.size());
        for (const std::string& name : builtin_names()) {
            const Dataset ds = builtin(name);
            std::cout << ds.name << std::string(name_width - ds.name.size(), ' ') << "  n="
                      << ds.y.size() << "  m=" << ds.predictors.cols() << "  " << ds.provenance
                      << "\n";
        }
        return 0;
    });
}
