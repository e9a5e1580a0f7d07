#include "qthermo/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <utility>

#include "qthermo/constants.hpp"
#include "qthermo/errors.hpp"

namespace qthermo {

namespace {

using Triplets = std::vector<Eigen::Triplet<cplx>>;

struct Entry {
    int row, col;
    cplx value;
};

std::vector<Entry> nonzeros(const Eigen::MatrixXcd &m) {
    std::vector<Entry> out;
    for (int j = 0; j < m.cols(); ++j) {
        for (int i = 0; i < m.rows(); ++i) {
            if (m(i, j) != cplx(0.0, 0.0)) out.push_back({i, j, m(i, j)});
        }
    }
    return out;
}

std::vector<Entry> identity_entries(int d) {
    std::vector<Entry> out(d);
    for (int i = 0; i < d; ++i) out[i] = {i, i, 1.0};
    return out;
}

// vec(alpha A X B) = alpha (B^T kron A) vec(X), column-major.
void add_sandwich(Triplets &t, const std::vector<Entry> &a, const std::vector<Entry> &b, cplx alpha, int d) {
    for (const Entry &eb : b) {
        for (const Entry &ea : a) {
            t.emplace_back(eb.col * d + ea.row, eb.row * d + ea.col, alpha * eb.value * ea.value);
        }
    }
}

void add_commutator(Triplets &t, const Eigen::MatrixXcd &h, cplx alpha, int d) {
    // alpha [H, X] = alpha H X - alpha X H
    const auto eh = nonzeros(h);
    const auto id = identity_entries(d);
    add_sandwich(t, eh, id, alpha, d);
    add_sandwich(t, id, eh, -alpha, d);
}

void add_dissipator(Triplets &t, const Eigen::MatrixXcd &l, int d) {
    const Eigen::MatrixXcd ldl = l.adjoint() * l;
    const auto el = nonzeros(l);
    const auto eld = nonzeros(l.adjoint());
    const auto ed = nonzeros(ldl);
    const auto id = identity_entries(d);
    add_sandwich(t, el, eld, 1.0, d);
    add_sandwich(t, ed, id, -0.5, d);
    add_sandwich(t, id, ed, -0.5, d);
}

SparseSuper from_triplets(const Triplets &t, int d) {
    SparseSuper s(d * d, d * d);
    s.setFromTriplets(t.begin(), t.end());
    s.prune(cplx(0.0, 0.0));
    return s;
}

SparseSuper commutator_super(const Eigen::MatrixXcd &h, int d) {
    Triplets t;
    add_commutator(t, h, cplx(0.0, -1.0), d);
    return from_triplets(t, d);
}

double level_rate(const DissipationSpec &diss, int upper) {
    switch (upper) {
        case 1:
            return diss.gamma_eg_mhz;
        case 2:
            return diss.gamma_fe_mhz;
        default:
            return diss.gamma_df() * upper / 3.0;
    }
}

const char *kPairNames[] = {"", "eg", "fe", "df"};

std::string pair_name(int upper) {
    if (upper < 4) return kPairNames[upper];
    return std::to_string(upper - 1) + std::to_string(upper);
}

DressedBasis dressed_basis(const CompositeSpace &space, const Eigen::MatrixXd &h_lab_ghz,
                           const Eigen::VectorXi &excitations) {
    const int dim = space.dim();
    DressedBasis out;
    out.vectors = Eigen::MatrixXcd::Zero(dim, dim);
    out.energies_ghz = Eigen::VectorXd::Zero(dim);
    const int n_max = excitations.maxCoeff();
    for (int n_exc = 0; n_exc <= n_max; ++n_exc) {
        std::vector<int> members;
        for (int i = 0; i < dim; ++i) {
            if (excitations(i) == n_exc) members.push_back(i);
        }
        const int m = static_cast<int>(members.size());
        Eigen::MatrixXd block(m, m);
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) block(a, b) = h_lab_ghz(members[a], members[b]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
        const Eigen::MatrixXd &vecs = solver.eigenvectors();
        // Greedy labelling by largest overlap with a bare state.
        std::vector<bool> bare_used(m, false), eig_used(m, false);
        for (int round = 0; round < m; ++round) {
            int best_bare = -1, best_eig = -1;
            double best = -1.0;
            for (int a = 0; a < m; ++a) {
                if (bare_used[a]) continue;
                for (int b = 0; b < m; ++b) {
                    if (eig_used[b]) continue;
                    if (std::abs(vecs(a, b)) > best) {
                        best = std::abs(vecs(a, b));
                        best_bare = a;
                        best_eig = b;
                    }
                }
            }
            bare_used[best_bare] = eig_used[best_eig] = true;
            const double sign = vecs(best_bare, best_eig) < 0.0 ? -1.0 : 1.0;
            const int label = members[best_bare];
            for (int a = 0; a < m; ++a) out.vectors(members[a], label) = sign * vecs(a, best_eig);
            out.energies_ghz(label) = solver.eigenvalues()(best_eig);
        }
    }
    out.energies_ghz.array() -= out.energies_ghz(0);
    return out;
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd &m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd &v, int d) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

struct ActiveDrive {
    const PulseEnvelope *pulse;
    const SparseSuper *plus;
    const SparseSuper *minus;
    const Eigen::MatrixXcd *op;  // X for pure-state evolution
};

std::vector<double> segment_edges(const std::vector<PulseEnvelope> &drives, double t0, double t1) {
    std::vector<double> edges{t0, t1};
    for (const auto &d : drives) {
        for (double e : {d.start_ns, d.end_ns()}) {
            if (e > t0 && e < t1) edges.push_back(e);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

std::vector<ActiveDrive> active_in(const LiouvillianSpec &L, const std::vector<PulseEnvelope> &drives, double a,
                                   double b) {
    std::vector<ActiveDrive> out;
    for (const auto &d : drives) {
        if (d.start_ns < b && d.end_ns() > a && d.amplitude != 0.0) {
            if (d.kind == PulseKind::GaussianDrive) {
                out.push_back({&d, &L.drive_plus, &L.drive_minus, &L.drive_raise});
            } else {
                out.push_back({&d, &L.probe_plus, &L.probe_minus, &L.ops.adag});
            }
        }
    }
    return out;
}

double segment_frame(const LiouvillianSpec &L, const std::vector<ActiveDrive> &active) {
    if (active.empty()) return L.reference_frame_ghz();
    const double f = active.front().pulse->carrier_ghz;
    for (const auto &d : active) {
        if (d.pulse->carrier_ghz != f) return L.reference_frame_ghz();
    }
    return f;
}

// 2pi A s(t) e^{-i theta(t)}
cplx drive_coefficient(const PulseEnvelope &p, double frame_ghz, double t) {
    const double s = p.shape(t);
    if (s == 0.0) return 0.0;
    const double theta = units::kTwoPi * (p.carrier_ghz - frame_ghz) * t + p.phase_rad;
    return units::kTwoPi * p.amplitude * s * std::polar(1.0, -theta);
}

void check_grid(const std::vector<double> &t_grid) {
    if (t_grid.empty()) throw DomainError("time grid is empty");
    for (size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= t_grid[i - 1])) throw DomainError("time grid must be ascending");
    }
}

}  // namespace

double DissipationSpec::gamma_df() const { return gamma_df_mhz.value_or(0.01 * gamma_fe_mhz); }

double DissipationSpec::kappa_for(const ResonatorSpec &r) const { return kappa_mhz.value_or(r.kappa_mhz()); }

void DissipationSpec::validate(const ResonatorSpec &r) const {
    for (double rate : {gamma_eg_mhz, gamma_fe_mhz, gamma_df(), kappa_for(r), dephasing_mhz}) {
        if (!(rate >= 0.0) || !std::isfinite(rate)) throw DomainError("dissipation rates must be non-negative");
    }
    if (!(bath_t_mk > 0.0)) throw DomainError("bath temperature must be positive");
    if (kappa_mhz && *kappa_mhz > 0.0) {
        const double implied = r.kappa_mhz();
        if (std::abs(*kappa_mhz - implied) > 0.01 * implied) {
            throw DomainError("kappa_mhz " + std::to_string(*kappa_mhz) + " inconsistent with f_r/Q_loaded = " +
                              std::to_string(implied) + " MHz");
        }
    }
}

DissipationSpec DissipationSpec::none(double bath_t_mk) {
    DissipationSpec d;
    d.gamma_eg_mhz = d.gamma_fe_mhz = 0.0;
    d.gamma_df_mhz = 0.0;
    d.kappa_mhz = 0.0;
    d.bath_t_mk = bath_t_mk;
    return d;
}

double bose_occupation(double f_ghz, double t_mk) {
    if (!(f_ghz > 0.0)) throw DomainError("occupation needs a positive frequency");
    if (!(t_mk > 0.0)) throw DomainError("temperature must be positive");
    return 1.0 / std::expm1(units::reduced_energy(f_ghz, t_mk));
}

ThermalOccupations thermal_occupations(const LevelEnergies &levels, double fr_ghz, double t_mk) {
    ThermalOccupations out;
    out.n_eg = bose_occupation(levels.f_ge_ghz, t_mk);
    out.n_fe = bose_occupation(levels.f_ef_ghz, t_mk);
    out.n_r = bose_occupation(fr_ghz, t_mk);
    return out;
}

Eigen::MatrixXcd LiouvillianSpec::hamiltonian(double frame_ghz) const {
    Eigen::MatrixXcd h = coupling;
    const auto &space = ops.space;
    for (int i = 0; i < dim(); ++i) {
        const int k = space.level_of(i), n = space.photons_of(i);
        h(i, i) += transmon.energies_ghz[k] + n * system.resonator.fr_ghz - frame_ghz * excitations(i);
    }
    return units::kTwoPi * h;
}

SparseSuper LiouvillianSpec::generator(double frame_ghz) const {
    SparseSuper h = commutator_super(hamiltonian(frame_ghz), dim());
    return h + dissipator;
}

Eigen::MatrixXcd LiouvillianSpec::generator_dense(double frame_ghz) const {
    return Eigen::MatrixXcd(generator(frame_ghz));
}

double LiouvillianSpec::dressed_transition_ghz(int k, int l) const {
    return dressed.energies_ghz(ops.space.index(l, 0)) - dressed.energies_ghz(ops.space.index(k, 0));
}

Eigen::MatrixXcd LiouvillianSpec::level_projector(int k) const {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim(), dim());
    for (int n = 0; n < ops.space.fock_dim; ++n) {
        const auto v = dressed.vectors.col(ops.space.index(k, n));
        p += v * v.adjoint();
    }
    return p;
}

LiouvillianSpec build_liouvillian(const SystemSpec &system, const DissipationSpec &dissipation) {
    system.validate();
    dissipation.validate(system.resonator);

    LiouvillianSpec L;
    L.system = system;
    L.dissipation = dissipation;
    L.transmon = diagonalize_transmon(system.transmon);
    L.ops = build_composite_operators(L.transmon, system.resonator, system.max_dim);
    const auto &space = L.ops.space;
    const int d = space.dim();
    const int levels = space.n_levels;
    const double t_mk = dissipation.bath_t_mk;

    L.excitations.resize(d);
    for (int i = 0; i < d; ++i) L.excitations(i) = space.excitations_of(i);

    const Eigen::MatrixXd &n_op = L.transmon.charge_operator;
    L.coupling = Eigen::MatrixXcd::Zero(d, d);
    L.drive_raise = Eigen::MatrixXcd::Zero(d, d);
    const double g = system.resonator.coupling_ghz;
    for (int k = 0; k + 1 < levels; ++k) {
        for (int n = 0; n < space.fock_dim; ++n) {
            L.drive_raise(space.index(k + 1, n), space.index(k, n)) = n_op(k + 1, k) / n_op(1, 0);
            if (n + 1 < space.fock_dim) {
                // |k+1, n><k, n+1| and its conjugate
                const double amp = g * n_op(k, k + 1) * std::sqrt(double(n + 1));
                L.coupling(space.index(k + 1, n), space.index(k, n + 1)) = amp;
                L.coupling(space.index(k, n + 1), space.index(k + 1, n)) = amp;
            }
        }
    }

    const Eigen::MatrixXd h_lab = (L.hamiltonian(0.0) / units::kTwoPi).real();
    L.dressed = dressed_basis(space, h_lab, L.excitations);
    // Jumps act on dressed labels, so the dressed product of thermal states
    // is stationary under the full coupled generator.
    const Eigen::MatrixXcd &u = L.dressed.vectors;
    auto dressed_op = [&](const Eigen::MatrixXcd &bare) {
        Eigen::MatrixXcd op = u * bare * u.adjoint();
        for (int j = 0; j < d; ++j) {
            for (int i = 0; i < d; ++i) {
                if (std::abs(op(i, j)) < 1e-14) op(i, j) = 0.0;
            }
        }
        return op;
    };
    auto dressed_energy = [&](int k, int n) { return L.dressed.energies_ghz(space.index(k, n)); };

    const auto dressed_levels = LevelEnergies::from_transitions(dressed_energy(1, 0), dressed_energy(2, 0));
    L.occupations = thermal_occupations(dressed_levels, dressed_energy(0, 1), t_mk);
    if (levels > 3) L.occupations.n_df = bose_occupation(dressed_energy(3, 0) - dressed_energy(2, 0), t_mk);

    for (int upper = 1; upper < levels; ++upper) {
        const double rate = units::rate_per_ns(level_rate(dissipation, upper));
        if (rate == 0.0) continue;
        const double f = dressed_energy(upper, 0) - dressed_energy(upper - 1, 0);
        const double nth = bose_occupation(f, t_mk);
        const std::string name = pair_name(upper);
        L.jumps.push_back({"down_" + name, rate * (nth + 1.0),
                           std::sqrt(rate * (nth + 1.0)) * dressed_op(L.ops.transition(upper - 1, upper))});
        if (nth > 0.0) {
            L.jumps.push_back(
                {"up_" + name, rate * nth, std::sqrt(rate * nth) * dressed_op(L.ops.transition(upper, upper - 1))});
        }
    }
    const double kappa = units::linewidth_per_ns(dissipation.kappa_for(system.resonator));
    if (kappa > 0.0) {
        const double nr = L.occupations.n_r;
        L.jumps.push_back({"resonator_down", kappa * (nr + 1.0), std::sqrt(kappa * (nr + 1.0)) * dressed_op(L.ops.a)});
        if (nr > 0.0) {
            L.jumps.push_back({"resonator_up", kappa * nr, std::sqrt(kappa * nr) * dressed_op(L.ops.adag)});
        }
    }
    if (dissipation.dephasing_mhz > 0.0) {
        const double rate = units::rate_per_ns(dissipation.dephasing_mhz);
        Eigen::MatrixXcd k_op = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 0; i < d; ++i) k_op(i, i) = space.level_of(i);
        L.jumps.push_back({"dephasing", 2.0 * rate, std::sqrt(2.0 * rate) * dressed_op(k_op)});
    }

    Triplets t;
    for (const auto &j : L.jumps) add_dissipator(t, j.op, d);
    L.dissipator = from_triplets(t, d);

    L.drive_plus = commutator_super(L.drive_raise, d);
    L.drive_minus = commutator_super(L.drive_raise.adjoint(), d);
    L.probe_plus = commutator_super(L.ops.adag, d);
    L.probe_minus = commutator_super(L.ops.a, d);
    return L;
}

std::vector<double> level_populations(const LiouvillianSpec &L, const Eigen::MatrixXcd &rho) {
    if (rho.rows() != L.dim() || rho.cols() != L.dim()) throw DimensionError("state dimension mismatch");
    const auto &space = L.ops.space;
    std::vector<double> p(space.n_levels, 0.0);
    const Eigen::MatrixXcd rv = rho * L.dressed.vectors;
    for (int i = 0; i < L.dim(); ++i) {
        p[space.level_of(i)] += L.dressed.vectors.col(i).dot(rv.col(i)).real();
    }
    return p;
}

Populations transmon_populations(const LiouvillianSpec &L, const Eigen::MatrixXcd &rho) {
    const auto p = level_populations(L, rho);
    return {p[0], p[1], p[2]};
}

cplx field_expectation(const LiouvillianSpec &L, const Eigen::MatrixXcd &rho) {
    return (rho * L.ops.a).trace();
}

DensityMatrix dressed_product_state(const LiouvillianSpec &L, const std::vector<double> &level_weights,
                                    double n_photons) {
    const auto &space = L.ops.space;
    if (static_cast<int>(level_weights.size()) > space.n_levels) {
        throw DimensionError("more level weights than retained levels");
    }
    if (!(n_photons >= 0.0)) throw DomainError("photon occupation must be non-negative");
    std::vector<double> r(space.fock_dim, 0.0);
    const double ratio = n_photons / (1.0 + n_photons);
    double z = 0.0;
    for (int n = 0; n < space.fock_dim; ++n) {
        r[n] = std::pow(ratio, n);
        z += r[n];
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(L.dim());
    for (int k = 0; k < static_cast<int>(level_weights.size()); ++k) {
        for (int n = 0; n < space.fock_dim; ++n) w(space.index(k, n)) = level_weights[k] * r[n] / z;
    }
    const auto &v = L.dressed.vectors;
    Eigen::MatrixXcd rho = v * w.cast<cplx>().asDiagonal() * v.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

void change_frame(const LiouvillianSpec &L, Eigen::VectorXcd &vec_rho, double from_ghz, double to_ghz,
                  double t_ns) {
    if (from_ghz == to_ghz || t_ns == 0.0) return;
    const int d = L.dim();
    const double w = units::kTwoPi * (to_ghz - from_ghz) * t_ns;
    const int spread = L.excitations.maxCoeff();
    std::vector<cplx> phase(2 * spread + 1);
    for (int m = -spread; m <= spread; ++m) phase[m + spread] = std::polar(1.0, w * m);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) vec_rho(j * d + i) *= phase[L.excitations(i) - L.excitations(j) + spread];
    }
}

Trajectory evolve(const DensityMatrix &rho0, const LiouvillianSpec &L, const std::vector<PulseEnvelope> &drives,
                  const std::vector<double> &t_grid, const OdeOptions &opts) {
    check_grid(t_grid);
    if (rho0.dim() != L.dim()) throw DimensionError("initial state dimension mismatch");
    for (const auto &p : drives) p.validate();

    const int d = L.dim();
    const double ref = L.reference_frame_ghz();
    const double t0 = t_grid.front(), t1 = t_grid.back();
    const auto edges = segment_edges(drives, t0, t1);

    Trajectory traj;
    traj.t_ns = t_grid;
    Eigen::VectorXcd v = vectorize(rho0.matrix());
    double frame = ref;
    size_t next = 0;
    std::vector<std::pair<double, SparseSuper>> cache;

    auto emit = [&](const Eigen::VectorXcd &state, double f, double t) {
        Eigen::VectorXcd s = state;
        change_frame(L, s, f, ref, t);
        Eigen::MatrixXcd m = unvectorize(s, d);
        traj.states.emplace_back(0.5 * (m + m.adjoint()));
    };

    while (next < t_grid.size() && t_grid[next] <= t0) {
        traj.states.push_back(DensityMatrix(rho0.matrix()));
        ++next;
    }

    for (size_t s = 0; s + 1 < edges.size(); ++s) {
        const double a = edges[s], b = edges[s + 1];
        const auto active = active_in(L, drives, a, b);
        const double f = segment_frame(L, active);
        change_frame(L, v, frame, f, a);
        frame = f;

        auto it = std::find_if(cache.begin(), cache.end(), [&](const auto &c) { return c.first == f; });
        if (it == cache.end()) {
            cache.emplace_back(f, L.generator(f));
            it = std::prev(cache.end());
        }
        const SparseSuper &gen = it->second;

        std::vector<double> t_out;
        while (next < t_grid.size() && t_grid[next] <= b) t_out.push_back(t_grid[next++]);
        const bool extra = t_out.empty() || t_out.back() != b;
        if (extra) t_out.push_back(b);

        OdeRhs rhs = [&](double t, const Eigen::VectorXcd &y, Eigen::VectorXcd &dy) {
            dy.noalias() = gen * y;
            for (const auto &drv : active) {
                const cplx c = drive_coefficient(*drv.pulse, f, t);
                if (c == cplx(0.0, 0.0)) continue;
                dy.noalias() += c * (*drv.plus * y);
                dy.noalias() += std::conj(c) * (*drv.minus * y);
            }
        };
        OdeStats stats;
        auto ys = integrate_dopri5(rhs, a, v, t_out, opts, &stats);
        traj.stats.accepted += stats.accepted;
        traj.stats.rejected += stats.rejected;
        traj.stats.rhs_evals += stats.rhs_evals;
        const size_t n_emit = ys.size() - (extra ? 1 : 0);
        for (size_t k = 0; k < n_emit; ++k) emit(ys[k], f, t_out[k]);
        v = ys.back();
    }
    return traj;
}

Eigen::VectorXcd evolve_pure(const Eigen::VectorXcd &psi0, const LiouvillianSpec &L,
                             const std::vector<PulseEnvelope> &drives, double t0, double t1, const OdeOptions &opts) {
    if (psi0.size() != L.dim()) throw DimensionError("initial state dimension mismatch");
    if (!(t1 >= t0)) throw DomainError("evolution interval reversed");
    for (const auto &p : drives) p.validate();

    const double ref = L.reference_frame_ghz();
    auto shift = [&](Eigen::VectorXcd &psi, double from, double to, double t) {
        if (from == to) return;
        const double w = units::kTwoPi * (to - from) * t;
        for (int i = 0; i < psi.size(); ++i) psi(i) *= std::polar(1.0, w * L.excitations(i));
    };

    Eigen::VectorXcd psi = psi0;
    double frame = ref;
    const auto edges = segment_edges(drives, t0, t1);
    for (size_t s = 0; s + 1 < edges.size(); ++s) {
        const double a = edges[s], b = edges[s + 1];
        const auto active = active_in(L, drives, a, b);
        const double f = segment_frame(L, active);
        shift(psi, frame, f, a);
        frame = f;
        const Eigen::SparseMatrix<cplx> h = L.hamiltonian(f).sparseView();
        std::vector<std::pair<Eigen::SparseMatrix<cplx>, Eigen::SparseMatrix<cplx>>> xs;
        for (const auto &drv : active) {
            Eigen::SparseMatrix<cplx> x = drv.op->sparseView();
            xs.emplace_back(x, Eigen::SparseMatrix<cplx>(x.adjoint()));
        }
        OdeRhs rhs = [&](double t, const Eigen::VectorXcd &y, Eigen::VectorXcd &dy) {
            Eigen::VectorXcd hy = h * y;
            for (size_t i = 0; i < active.size(); ++i) {
                const cplx c = drive_coefficient(*active[i].pulse, f, t);
                if (c == cplx(0.0, 0.0)) continue;
                hy += c * (xs[i].first * y);
                hy += std::conj(c) * (xs[i].second * y);
            }
            dy = cplx(0.0, -1.0) * hy;
        };
        const double end[] = {b};
        psi = integrate_dopri5(rhs, a, psi, end, opts).back();
    }
    shift(psi, frame, ref, t1);
    return psi;
}

DensityMatrix steady_state(const LiouvillianSpec &L) {
    if (L.jumps.empty()) throw DomainError("steady state needs at least one dissipative channel");
    const int d = L.dim();
    Eigen::MatrixXcd gen = L.generator_dense(L.reference_frame_ghz());
    const double norm = gen.norm();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr;
    qr.setThreshold(1e-11);
    qr.compute(gen);
    const long nullity = gen.cols() - qr.rank();
    if (nullity != 1) {
        throw AmbiguityError("Liouvillian null space has dimension " + std::to_string(nullity) + ", expected 1");
    }

    Eigen::MatrixXcd sys = gen;
    sys.row(0).setZero();
    for (int i = 0; i < d; ++i) sys(0, i * d + i) = 1.0;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d * d);
    rhs(0) = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys);
    Eigen::VectorXcd x = lu.solve(rhs);
    if (!x.allFinite()) throw SolveError("steady-state solve produced non-finite values");

    Eigen::MatrixXcd rho = unvectorize(x, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace();
    const double residual = (gen * vectorize(rho)).norm();
    if (residual > 1e-10 * norm) {
        throw SolveError("steady-state residual " + std::to_string(residual) + " exceeds tolerance");
    }
    return DensityMatrix(std::move(rho));
}

void write_trajectory_csv(std::ostream &os, const LiouvillianSpec &L, const Trajectory &traj) {
    os << "t_ns,p_g,p_e,p_f,p_d,re_a,im_a\n";
    os << std::setprecision(12);
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const auto &m = traj.states[i].matrix();
        const auto p = level_populations(L, m);
        const cplx a = field_expectation(L, m);
        os << traj.t_ns[i];
        for (int k = 0; k < 4; ++k) os << ',' << (k < static_cast<int>(p.size()) ? p[k] : 0.0);
        os << ',' << a.real() << ',' << a.imag() << '\n';
    }
}

}  // namespace qthermo
