#include "neelwall/linops.hpp"

#include <lapacke.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace neel {

std::string to_string(OperatorLabel label) {
    switch (label) {
        case OperatorLabel::L1: return "L1";
        case OperatorLabel::L2: return "L2";
        case OperatorLabel::L0: return "L0";
        default: return "custom";
    }
}

OperatorCoefficients OperatorCoefficients::from_wall(const WallProfile& wall) {
    const Grid& g = wall.grid();
    const int n = g.size();
    OperatorCoefficients c{g,           wall.params,     RealField(g),
                           RealField(g), wall.derivative, RealField(g)};
    RealField w = wall.profile.decaying_part();
    ReferenceTrig trig(g.half_length(), n, wall.profile.reference_scale());
    trig.evaluate(w.values(), c.cos_theta.values(), c.sin_theta.values());
    StrayFieldOperator op(g, wall.params.epsilon);
    RealField s = op.apply(c.cos_theta);
    for (int j = 0; j < n; ++j) c.stray_diag[j] = s[j] * c.cos_theta[j];
    return c;
}

OperatorCoefficients OperatorCoefficients::shifted(int nodes) const {
    const int n = grid.size();
    auto rot = [&](const RealField& f) {
        RealField out(grid);
        for (int j = 0; j < n; ++j) out[(j + nodes % n + n) % n] = f[j];
        return out;
    };
    return OperatorCoefficients{grid,           params,           rot(cos_theta),
                                rot(sin_theta), rot(theta_prime), rot(stray_diag)};
}

LinearOperatorMatrix::LinearOperatorMatrix(Eigen::MatrixXd entries, bool symmetric,
                                           const Grid& grid, OperatorLabel label)
    : entries_(std::move(entries)), symmetric_(symmetric), grid_(grid), label_(label) {
    if (symmetric_) {
        const double scale = entries_.cwiseAbs().maxCoeff();
        const double defect = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
        if (defect > 1e-10 * std::max(scale, 1.0))
            throw NumericalFailure("operator flagged symmetric has defect " +
                                   std::to_string(defect));
        entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
    }
}

namespace {

// Dense circulant realizing a real even Fourier multiplier.
Eigen::MatrixXd multiplier_matrix(const Grid& g, const std::vector<double>& mult) {
    const int n = g.size();
    std::vector<spectral::Complex> spec(n);
    for (int k = 0; k < n; ++k) spec[k] = mult[k];
    std::vector<double> col;
    spectral::transform_for(n).inverse(spec, col);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = col[(i - j + n) % n];
    return m;
}

Eigen::MatrixXd laplacian_matrix(const Grid& g) {
    std::vector<double> mult(g.size());
    for (int k = 0; k < g.size(); ++k) {
        const double xi = g.frequency(k);
        mult[k] = -xi * xi;
    }
    return multiplier_matrix(g, mult);
}

Eigen::MatrixXd stray_matrix(const Grid& g, double epsilon) {
    return multiplier_matrix(g, StrayFieldOperator(g, epsilon).effective_multiplier());
}

} // namespace

LinearOperatorMatrix assemble_L1(const OperatorCoefficients& c) {
    const Grid& g = c.grid;
    const int n = g.size();
    Eigen::MatrixXd a = c.params.kappa * laplacian_matrix(g) + stray_matrix(g, c.params.epsilon);
    for (int j = 0; j < n; ++j) {
        const double cs = c.cos_theta[j], sn = c.sin_theta[j], tp = c.theta_prime[j];
        a(j, j) += -1.0 / c.params.epsilon - 0.5 + 0.5 * (cs * cs - sn * sn) +
                   c.params.kappa * tp * tp + c.stray_diag[j];
    }
    return LinearOperatorMatrix(std::move(a), true, g, OperatorLabel::L1);
}

LinearOperatorMatrix assemble_L2(const OperatorCoefficients& c) {
    const Grid& g = c.grid;
    const int n = g.size();
    Eigen::MatrixXd s = stray_matrix(g, c.params.epsilon);
    Eigen::MatrixXd a = c.params.kappa * laplacian_matrix(g);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) -= c.sin_theta[i] * s(i, j) * c.sin_theta[j];
    for (int j = 0; j < n; ++j) {
        const double cs = c.cos_theta[j], sn = c.sin_theta[j];
        a(j, j) += (cs * cs - sn * sn) + c.stray_diag[j];
    }
    return LinearOperatorMatrix(std::move(a), true, g, OperatorLabel::L2);
}

LinearOperatorMatrix assemble_L0(const OperatorCoefficients& c, double alpha) {
    LinearOperatorMatrix l1 = assemble_L1(c);
    LinearOperatorMatrix l2 = assemble_L2(c);
    const int n = c.grid.size();
    Eigen::MatrixXd a(2 * n, 2 * n);
    a.topLeftCorner(n, n) = l1.entries();
    a.topRightCorner(n, n) = alpha * l2.entries();
    a.bottomLeftCorner(n, n) = -alpha * l1.entries();
    a.bottomRightCorner(n, n) = l2.entries();
    return LinearOperatorMatrix(std::move(a), false, c.grid, OperatorLabel::L0);
}

LinearOperatorMatrix assemble_L1(const WallProfile& wall) {
    return assemble_L1(OperatorCoefficients::from_wall(wall));
}
LinearOperatorMatrix assemble_L2(const WallProfile& wall) {
    return assemble_L2(OperatorCoefficients::from_wall(wall));
}
LinearOperatorMatrix assemble_L0(const WallProfile& wall, double alpha) {
    return assemble_L0(OperatorCoefficients::from_wall(wall), alpha);
}

double quadratic_form_G(const LinearOperatorMatrix& op, const RealField& u, const RealField& v) {
    require_same_grid(u, v);
    if (op.size() != u.size()) throw DimensionMismatch("operator size does not match field");
    Eigen::Map<const Eigen::VectorXd> uv(u.data().data(), u.size());
    Eigen::VectorXd au = op.apply(uv);
    double s = 0.0;
    for (int j = 0; j < v.size(); ++j) s += au[j] * v[j];
    return -u.grid().spacing() * s;
}

double quadratic_form_H(const RealField& u, const RealField& v, double epsilon) {
    require_same_grid(u, v);
    const Grid& g = u.grid();
    auto su = spectral::forward(u);
    auto sv = spectral::forward(v);
    double acc = 0.0;
    for (int k = 0; k < g.size(); ++k) {
        const double weight = 1.0 + rescaled_symbol(g.frequency(k), epsilon);
        acc += weight * (su[k] * std::conj(sv[k])).real();
    }
    const double n = g.size();
    return acc * 2.0 * g.half_length() / (n * n);
}

std::vector<std::complex<double>> general_eigenvalues(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXd work = a;  // dgeev destroys its input
    std::vector<double> wr(n), wi(n);
    const int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(),
                                   wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0)
        throw NumericalFailure("dgeev failed with info " + std::to_string(info) +
                               " (matrix norm " + std::to_string(a.norm()) + ")");
    std::vector<std::complex<double>> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = {wr[i], wi[i]};
    return ev;
}

namespace {

SpectrumReport report_from_eigenvalues(std::vector<std::complex<double>> ev, std::string label,
                                       SpectrumTolerances tol) {
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    SpectrumReport rep;
    rep.label = std::move(label);
    rep.size = static_cast<int>(ev.size());
    rep.tolerances = tol;
    rep.eigenvalues = std::move(ev);
    double scale = 0.0;
    for (auto& l : rep.eigenvalues) scale = std::max(scale, std::abs(l));
    rep.scale = scale;
    const double zero_abs = tol.zero_tol * scale;
    double gap = std::numeric_limits<double>::infinity();
    double max_re = -std::numeric_limits<double>::infinity();
    bool any_nonzero = false;
    for (auto& l : rep.eigenvalues) {
        const double mod = std::abs(l);
        if (mod <= zero_abs) {
            ++rep.kernel_dimension;
            continue;
        }
        any_nonzero = true;
        gap = std::min(gap, mod);
        max_re = std::max(max_re, l.real());
        if (std::abs(l.real()) <= tol.re_tol * scale) rep.imaginary_axis_violations.push_back(l);
    }
    rep.spectral_gap = any_nonzero ? gap : 0.0;
    rep.max_real_nonzero = any_nonzero ? max_re : 0.0;
    return rep;
}

} // namespace

SpectrumReport spectrum(const LinearOperatorMatrix& op, SpectrumTolerances tol) {
    std::vector<std::complex<double>> ev;
    if (op.symmetric()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.entries(),
                                                              Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw NumericalFailure("symmetric eigensolver failed; operator norm " +
                                   std::to_string(op.entries().norm()));
        for (int i = 0; i < op.size(); ++i) ev.emplace_back(solver.eigenvalues()[i], 0.0);
    } else {
        ev = general_eigenvalues(op.entries());
    }
    return report_from_eigenvalues(std::move(ev), to_string(op.label()), tol);
}

SpectrumReport block_lemma_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double alpha,
                                 SpectrumTolerances tol) {
    const int n = static_cast<int>(A.rows());
    if (A.rows() != A.cols() || B.rows() != B.cols() || B.rows() != n)
        throw InvalidParameter("block lemma inputs must be square and of equal size");
    if (n > 1024) throw ResourceLimit("block lemma check is a desk-scale tool (n <= 1024)");
    const double sa = std::max(1.0, A.cwiseAbs().maxCoeff());
    const double sb = std::max(1.0, B.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * sa ||
        (B - B.transpose()).cwiseAbs().maxCoeff() > 1e-10 * sb)
        throw InvalidParameter("block lemma requires symmetric inputs");
    Eigen::MatrixXd t(2 * n, 2 * n);
    t.topLeftCorner(n, n) = A;
    t.topRightCorner(n, n) = alpha * B;
    t.bottomLeftCorner(n, n) = -alpha * A;
    t.bottomRightCorner(n, n) = B;
    return report_from_eigenvalues(general_eigenvalues(t), "block", tol);
}

RangeProjection project_range(const RealField& f1, const RealField& f2, const WallProfile& wall,
                              double alpha) {
    require_same_grid(f1, f2);
    if (f1.grid() != wall.grid()) throw DimensionMismatch("fields must live on the wall grid");
    const RealField& tp = wall.derivative;
    double num = 0.0;
    for (int j = 0; j < f1.size(); ++j) num += (alpha * f1[j] + f2[j]) * tp[j];
    const double lambda = num / (inner_product(tp, tp) / f1.grid().spacing());
    RealField g2 = f2;
    for (int j = 0; j < g2.size(); ++j) g2[j] -= lambda * tp[j];
    return RangeProjection{f1, std::move(g2), lambda};
}

std::pair<RealField, RealField> solve_in_range(const LinearOperatorMatrix& L1,
                                               const LinearOperatorMatrix& L2,
                                               const WallProfile& wall, double alpha,
                                               const RealField& f1, const RealField& f2) {
    const Grid& g = wall.grid();
    const int n = g.size();
    if (L1.size() != n || L2.size() != n || f1.size() != n)
        throw DimensionMismatch("operator/field sizes disagree");
    const double c = 1.0 + alpha * alpha;
    Eigen::VectorXd rhs1(n), rhs2(n);
    for (int j = 0; j < n; ++j) {
        rhs1[j] = f1[j] - alpha * f2[j];
        rhs2[j] = alpha * f1[j] + f2[j];
    }
    Eigen::VectorXd u1 = (c * L1.entries()).partialPivLu().solve(rhs1);

    // Bordered system pins u2 to the orthogonal complement of theta'.
    Eigen::MatrixXd m(n + 1, n + 1);
    m.setZero();
    m.topLeftCorner(n, n) = c * L2.entries();
    for (int j = 0; j < n; ++j) {
        m(j, n) = wall.derivative[j];
        m(n, j) = wall.derivative[j];
    }
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = rhs2;
    rhs[n] = 0.0;
    Eigen::VectorXd sol = m.partialPivLu().solve(rhs);

    RealField out1(g), out2(g);
    for (int j = 0; j < n; ++j) {
        out1[j] = u1[j];
        out2[j] = sol[j];
    }
    return {std::move(out1), std::move(out2)};
}

Eigen::MatrixXd matrix_exponential(const LinearOperatorMatrix& op, double t) {
    if (op.size() > 2048)
        throw ResourceLimit("dense matrix exponential limited to size 2048; "
                            "use a coarse projection");
    return (t * op.entries()).exp();
}

Eigen::VectorXd semigroup_action(const LinearOperatorMatrix& op, double t,
                                 const Eigen::VectorXd& u) {
    if (t < 0.0) throw InvalidParameter("semigroup action requires t >= 0");
    if (u.size() != op.size()) throw DimensionMismatch("vector size does not match operator");
    return matrix_exponential(op, t) * u;
}

Eigen::VectorXd stack_fields(const RealField& top, const RealField& bottom) {
    require_same_grid(top, bottom);
    const int n = top.size();
    Eigen::VectorXd v(2 * n);
    for (int j = 0; j < n; ++j) {
        v[j] = top[j];
        v[n + j] = bottom[j];
    }
    return v;
}

std::pair<RealField, RealField> unstack_fields(const Grid& grid, const Eigen::VectorXd& v) {
    const int n = grid.size();
    if (v.size() != 2 * n) throw DimensionMismatch("stacked vector has wrong length");
    RealField a(grid), b(grid);
    for (int j = 0; j < n; ++j) {
        a[j] = v[j];
        b[j] = v[n + j];
    }
    return {std::move(a), std::move(b)};
}

std::string SpectrumReport::to_json() const {
    nlohmann::json j;
    j["label"] = label;
    j["size"] = size;
    j["scale"] = scale;
    j["kernel_dimension"] = kernel_dimension;
    j["spectral_gap"] = spectral_gap;
    j["max_real_nonzero"] = max_real_nonzero;
    j["tolerances"] = {{"re_tol", tolerances.re_tol}, {"zero_tol", tolerances.zero_tol}};
    nlohmann::json ev = nlohmann::json::array();
    for (auto& l : eigenvalues) ev.push_back({l.real(), l.imag()});
    j["eigenvalues"] = std::move(ev);
    nlohmann::json viol = nlohmann::json::array();
    for (auto& l : imaginary_axis_violations) viol.push_back({l.real(), l.imag()});
    j["imaginary_axis_violations"] = std::move(viol);
    if (!claims.empty()) j["claims"] = claims;
    return j.dump(2);
}

} // namespace neel
