#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppife/error_analysis.hpp"
#include "ppife/manufactured_problem.hpp"
#include "ppife/mesh.hpp"
#include "ppife/time_integration.hpp"

namespace ppife {

class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration of one run or convergence study of the benchmark problem.
struct RunConfig {
    std::vector<int> study{10, 20, 40, 80, 160};
    double theta = 1.0;
    int epsilon = 1;
    double sigma0 = 1.0;
    double alpha = 1.0;
    double beta_minus = 1.0;
    double beta_plus = 10.0;
    double dt_rule = 2.0;  // dt = dt_rule * h
    double t_final = 1.0;
    InitMode init = InitMode::Interpolation;
    std::string csv_path;
    std::string field_path;
    bool export_field = false;

    void validate() const {
        if (study.empty()) throw UsageError("study list must not be empty");
        for (std::size_t k = 0; k < study.size(); ++k) {
            if (study[k] < 2) throw UsageError("mesh sizes must be >= 2");
            if (k > 0 && study[k] <= study[k - 1])
                throw UsageError("study list must be strictly increasing");
        }
        if (epsilon != -1 && epsilon != 0 && epsilon != 1)
            throw UsageError("epsilon must be -1, 0 or 1");
        if (theta < 0.0 || theta > 1.0) throw UsageError("theta must lie in [0,1]");
        if (sigma0 < 0.0 || alpha <= 0.0 || beta_minus <= 0.0 || beta_plus <= 0.0 ||
            dt_rule <= 0.0 || t_final <= 0.0)
            throw UsageError("physical parameters must be positive");
    }

    EllipseProblem problem() const {
        EllipseProblem prob;
        prob.beta_minus = beta_minus;
        prob.beta_plus = beta_plus;
        prob.t_final = t_final;
        return prob;
    }

    PenaltyConfig penalty() const { return {epsilon, sigma0, alpha}; }
};

/// Per-mesh study results.
struct ConvergenceReport {
    std::vector<ErrorRecord> records;
    std::vector<int> mesh_sizes;
    std::vector<double> vertex_linf;  // superconvergent nodal statistic
    bool complete = false;
};

inline TransientProblem make_transient_problem(const EllipseProblem& prob) {
    TransientProblem tp;
    tp.source = [prob](Point2 p, double t, Side s) { return prob.source_f_side(p.x, p.y, t, s); };
    tp.dirichlet = [prob](Point2 p, double t) { return prob.boundary_g(p.x, p.y, t); };
    tp.initial = [prob](Point2 p) { return prob.initial_u0(p.x, p.y); };
    tp.initial_flux = [prob](Point2 p) {
        const Side s = prob.side(p.x, p.y);
        const Point2 g = prob.exact_grad_u_side(p.x, p.y, 0.0, s);
        return Point2{prob.beta(s) * g.x, prob.beta(s) * g.y};
    };
    return tp;
}

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

inline std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace detail

/// Plain-text field dump: per-element closed 5x5 samples, one line per
/// sample, `x y value side`, deterministic element-major order.
inline void export_field_impl(const GlobalSpace& space, const std::vector<double>& coeffs,
                              std::ostream& os) {
    os << "# x y value side\n";
    const CartesianMesh& mesh = space.mesh();
    char buf[96];
    for (int ie = 0; ie < mesh.n_elements(); ++ie) {
        const IFEElementBasis& basis = space.element_basis(ie);
        const AxisRect rect = mesh.element_rect(ie);
        auto gv = mesh.element_vertices(ie);
        for (int sy = 0; sy < 5; ++sy)
            for (int sx = 0; sx < 5; ++sx) {
                const Point2 p{rect.origin.x + rect.width * sx / 4.0,
                               rect.origin.y + rect.height * sy / 4.0};
                double uh = 0.0;
                for (int i = 0; i < 4; ++i) uh += coeffs[gv[i]] * basis.eval(i, p);
                std::snprintf(buf, sizeof buf, "%s %s %s %s\n", detail::sci(p.x).c_str(),
                              detail::sci(p.y).c_str(), detail::sci(uh).c_str(),
                              to_string(basis.side_at(p)));
                os << buf;
            }
    }
}

inline void export_field(const GlobalSpace& space, const std::vector<double>& coeffs,
                         const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("export_field: cannot open " + path);
    export_field_impl(space, coeffs, os);
    if (!os) throw std::runtime_error("export_field: write failed for " + path);
}

/// Runs one mesh of the benchmark and returns errors at the final time.
inline ErrorRecord run_single(const RunConfig& cfg, int n_side, double* vertex_linf_out = nullptr) {
    const EllipseProblem prob = cfg.problem();
    const InterfaceCurve curve = prob.curve();

    CartesianMesh mesh = build_mesh(AxisRect({0.0, 0.0}, 1.0, 1.0), n_side);
    MeshClassification cls = classify_mesh(mesh, curve);
    GlobalSpace space(std::move(mesh), std::move(cls), cfg.beta_minus, cfg.beta_plus);

    const double h = space.mesh().h();
    ThetaSchemeConfig scheme;
    scheme.theta = cfg.theta;
    scheme.t_final = cfg.t_final;
    scheme.n_steps = std::max(1, static_cast<int>(std::lround(cfg.t_final / (cfg.dt_rule * h))));

    TransientSolution sol =
        run_transient(space, curve, cfg.penalty(), scheme, make_transient_problem(prob), cfg.init);

    const double T = cfg.t_final;
    auto exact = [&](Point2 p) { return prob.exact_u(p.x, p.y, T); };
    auto exact_grad = [&](Point2 p) { return prob.exact_grad_u(p.x, p.y, T); };

    ErrorRecord rec;
    rec.h = h;
    rec.dt = scheme.dt();
    rec.linf = linf_error(space, sol.final_level(), exact);
    rec.l2 = l2_error(space, sol.final_level(), exact);
    rec.h1_semi = h1_semi_error(space, sol.final_level(), exact_grad);
    rec.energy = energy_error(space, sol.final_level(), exact_grad, cfg.penalty(), curve);
    if (vertex_linf_out) *vertex_linf_out = max_vertex_error(space, sol.final_level(), exact);

    if (cfg.export_field && !cfg.field_path.empty()) {
        std::ofstream os(cfg.field_path + (cfg.study.size() > 1 ? "." + std::to_string(n_side) : ""));
        export_field_impl(space, sol.final_level(), os);
    }
    return rec;
}

inline void write_csv(const ConvergenceReport& report, std::ostream& os) {
    os << "h,dt,linf,linf_rate,l2,l2_rate,h1,h1_rate,energy,energy_rate\n";
    for (const ErrorRecord& r : report.records) {
        auto rate = [](const std::optional<double>& v) {
            return v ? detail::fixed4(*v) : std::string();
        };
        os << detail::sci(r.h) << ',' << detail::sci(r.dt) << ',' << detail::sci(r.linf) << ','
           << rate(r.linf_rate) << ',' << detail::sci(r.l2) << ',' << rate(r.l2_rate) << ','
           << detail::sci(r.h1_semi) << ',' << rate(r.h1_rate) << ',' << detail::sci(r.energy)
           << ',' << rate(r.energy_rate) << '\n';
    }
}

inline void print_table(const ConvergenceReport& report, std::ostream& os) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%8s %12s %7s %12s %7s %12s %7s %12s %7s\n", "h", "Linf",
                  "rate", "L2", "rate", "H1", "rate", "energy", "rate");
    os << buf;
    for (std::size_t k = 0; k < report.records.size(); ++k) {
        const ErrorRecord& r = report.records[k];
        std::string hname = "1/" + std::to_string(report.mesh_sizes[k]);
        auto rate = [](const std::optional<double>& v) {
            return v ? detail::fixed4(*v) : std::string("-");
        };
        std::snprintf(buf, sizeof buf, "%8s %12s %7s %12s %7s %12s %7s %12s %7s\n", hname.c_str(),
                      detail::sci(r.linf).c_str(), rate(r.linf_rate).c_str(),
                      detail::sci(r.l2).c_str(), rate(r.l2_rate).c_str(),
                      detail::sci(r.h1_semi).c_str(), rate(r.h1_rate).c_str(),
                      detail::sci(r.energy).c_str(), rate(r.energy_rate).c_str());
        os << buf;
    }
}

/// Runs every mesh of the study, prints the aligned table and writes the
/// CSV when a path is configured. Partial results are flushed when a mesh
/// fails.
inline ConvergenceReport run_study(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    ConvergenceReport report;
    std::string failure;
    for (int n_side : cfg.study) {
        double nodal = 0.0;
        try {
            report.records.push_back(run_single(cfg, n_side, &nodal));
        } catch (const std::exception& e) {
            failure = "mesh " + std::to_string(n_side) + ": " + e.what();
            break;
        }
        report.mesh_sizes.push_back(n_side);
        report.vertex_linf.push_back(nodal);
    }
    rates(report.records);
    report.complete = report.mesh_sizes.size() == cfg.study.size();

    print_table(report, os);
    if (!cfg.csv_path.empty()) {
        std::ofstream csv(cfg.csv_path);
        if (!csv) throw std::runtime_error("run_study: cannot open " + cfg.csv_path);
        write_csv(report, csv);
    }
    if (!failure.empty()) os << "FAILED: " << failure << "\n";
    return report;
}

}  // namespace ppife
