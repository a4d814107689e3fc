#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gaugeframe/flow_engine.hpp"
#include "gaugeframe/models/model_system.hpp"

namespace gaugeframe {

// Parametrized scalar field theory on a D-dimensional lattice (D = 1 or 2).
// Per site there are D+1 embedding pairs (X^A; Pi_A) and one matter pair
// (phi; pi); every pair carries the density weight 1/dz^D.  The solved
// constraint attached to (A, site) is
//     h_A = dz^D [ n_A Z + q^{ab} eta_AB X^B_{,a} Z_b ]
// with induced metric q_ab = eta_AB X^A_{,a} X^B_{,b}, co-normal n_A
// (eta^{AB} n_A n_B = -det q,  n_A X^A_{,a} = 0), energy density
// Z = (pi^2/det q + q^{ab} phi_{,a} phi_{,b} + mu^2 phi^2)/2 and momentum
// density Z_a = pi phi_{,a}.  Spatial derivatives are second-order central
// differences with Dirichlet zero padding; matter is expected to stay inside
// a guard band of empty boundary sites so that the padding never meets a
// nonzero field.

// Static description of the lattice: site count, spacing, index bookkeeping
// and the coordinate slots of each field in the kinematical layout
// [positions | momenta] with pairs ordered embedding-major, matter last.
struct LatticeLayout {
    int dim = 1;
    int sites = 64;
    double spacing = 0.1;
    int guard_band = 8;

    std::size_t n_sites() const {
        const auto n = static_cast<std::size_t>(sites);
        return dim == 1 ? n : n * n;
    }
    std::size_t n_embedding() const { return static_cast<std::size_t>(dim) + 1; }
    std::size_t n_pairs() const { return (n_embedding() + 1) * n_sites(); }
    double cell_volume() const { return std::pow(spacing, dim); }

    // Flat site index decomposition: axis 0 is fastest.
    int axis_index(std::size_t site, int axis) const {
        return axis == 0 ? static_cast<int>(site) % sites
                         : static_cast<int>(site) / sites;
    }
    double axis_coordinate(int index) const {
        return (index - 0.5 * (sites - 1)) * spacing;
    }
    Vector position(std::size_t site) const {
        Vector z(dim);
        for (int a = 0; a < dim; ++a) {
            z[a] = axis_coordinate(axis_index(site, a));
        }
        return z;
    }
    // Neighbour along an axis, or -1 when it falls off the lattice.
    long neighbor(std::size_t site, int axis, int direction) const {
        const int idx = axis_index(site, axis) + direction;
        if (idx < 0 || idx >= sites) return -1;
        const long stride = axis == 0 ? 1 : sites;
        return static_cast<long>(site) + direction * stride;
    }
    bool in_guard_band(std::size_t site) const {
        for (int a = 0; a < dim; ++a) {
            const int idx = axis_index(site, a);
            if (idx < guard_band || idx >= sites - guard_band) return true;
        }
        return false;
    }

    // Coordinate slots (pair k has position slot k, momentum slot n_pairs + k).
    Eigen::Index x_slot(std::size_t A, std::size_t site) const {
        return static_cast<Eigen::Index>(A * n_sites() + site);
    }
    Eigen::Index y_slot(std::size_t A, std::size_t site) const {
        return static_cast<Eigen::Index>(n_pairs() + A * n_sites() + site);
    }
    Eigen::Index phi_slot(std::size_t site) const {
        return static_cast<Eigen::Index>(n_embedding() * n_sites() + site);
    }
    Eigen::Index pi_slot(std::size_t site) const {
        return static_cast<Eigen::Index>(n_pairs() + n_embedding() * n_sites() + site);
    }

    // Central difference along an axis of the lattice function stored at
    // slots [base, base + n_sites), with zero padding outside the lattice.
    double diff(const Vector& coords, Eigen::Index base, std::size_t site,
                int axis) const {
        const long up = neighbor(site, axis, +1);
        const long down = neighbor(site, axis, -1);
        const double upper = up < 0 ? 0.0 : coords[base + up];
        const double lower = down < 0 ? 0.0 : coords[base + down];
        return (upper - lower) / (2.0 * spacing);
    }

    static LatticeLayout from(const LatticePftParams& params) {
        if (params.dim != 1 && params.dim != 2) {
            throw ConfigError("lattice_pft: dim must be 1 or 2");
        }
        if (params.sites < 8) {
            throw ConfigError("lattice_pft: need at least 8 sites per dimension");
        }
        if (!(params.spacing > 0.0)) {
            throw ConfigError("lattice_pft: spacing must be positive");
        }
        if (params.mu < 0.0) {
            throw ConfigError("lattice_pft: mu must be non-negative");
        }
        if (params.guard_band < 1 || 2 * params.guard_band + 3 > params.sites) {
            throw ConfigError("lattice_pft: guard band leaves no interior");
        }
        return LatticeLayout{params.dim, params.sites, params.spacing,
                             params.guard_band};
    }
};

inline LatticeLayout lattice_layout(const ModelSystem& model) {
    const auto* params = std::get_if<LatticePftParams>(&model.params);
    if (!params) {
        throw ConfigError("lattice_layout: model does not carry lattice parameters");
    }
    return LatticeLayout::from(*params);
}

// Pointwise embedding geometry at one site.
struct LatticeGeometry {
    Matrix deriv;           // X^A_{,a}: (D+1) x D
    Vector normal;          // co-normal n_A
    Matrix metric;          // induced q_ab
    Matrix inverse_metric;  // q^{ab}
    double det = 0.0;
};

inline LatticeGeometry lattice_geometry(const LatticeLayout& layout,
                                        const Vector& coords, std::size_t site) {
    const int D = layout.dim;
    const std::size_t n_embed = layout.n_embedding();
    LatticeGeometry g;
    g.deriv = Matrix(n_embed, D);
    for (std::size_t A = 0; A < n_embed; ++A) {
        for (int a = 0; a < D; ++a) {
            g.deriv(static_cast<Eigen::Index>(A), a) =
                layout.diff(coords, layout.x_slot(A, 0), site, a);
        }
    }
    // q_ab = eta_AB X^A_{,a} X^B_{,b} with eta = diag(-1, +1, ..).
    g.metric = Matrix(D, D);
    for (int a = 0; a < D; ++a) {
        for (int b = 0; b < D; ++b) {
            double q = -g.deriv(0, a) * g.deriv(0, b);
            for (std::size_t A = 1; A < n_embed; ++A) {
                q += g.deriv(static_cast<Eigen::Index>(A), a) *
                     g.deriv(static_cast<Eigen::Index>(A), b);
            }
            g.metric(a, b) = q;
        }
    }
    g.normal = Vector(n_embed);
    if (D == 1) {
        g.normal[0] = g.deriv(1, 0);
        g.normal[1] = -g.deriv(0, 0);
        g.det = g.metric(0, 0);
        g.inverse_metric = Matrix::Constant(1, 1, 1.0 / g.det);
    } else {
        // n_A = epsilon_{ABC} X^B_{,1} X^C_{,2} with epsilon_{012} = +1.
        const auto d1 = g.deriv.col(0), d2 = g.deriv.col(1);
        g.normal[0] = d1[1] * d2[2] - d1[2] * d2[1];
        g.normal[1] = d1[2] * d2[0] - d1[0] * d2[2];
        g.normal[2] = d1[0] * d2[1] - d1[1] * d2[0];
        g.det = g.metric(0, 0) * g.metric(1, 1) - g.metric(0, 1) * g.metric(1, 0);
        g.inverse_metric = Matrix(2, 2);
        g.inverse_metric << g.metric(1, 1), -g.metric(0, 1), -g.metric(1, 0),
            g.metric(0, 0);
        g.inverse_metric /= g.det;
    }
    return g;
}

namespace pft_detail {

// True when phi at the site and its stencil neighbours and pi at the site all
// vanish, in which case h_A = 0 exactly and the geometry need not be touched.
// This is what keeps the zero-padded boundary (where the embedding itself is
// not small) from ever feeding garbage derivatives into a constraint value.
inline bool matter_absent(const LatticeLayout& layout, const Vector& coords,
                          std::size_t site) {
    if (coords[layout.phi_slot(site)] != 0.0) return false;
    if (coords[layout.pi_slot(site)] != 0.0) return false;
    for (int a = 0; a < layout.dim; ++a) {
        for (int dir : {-1, 1}) {
            const long n = layout.neighbor(site, a, dir);
            if (n >= 0 && coords[layout.phi_slot(0) + n] != 0.0) return false;
        }
    }
    return true;
}

}  // namespace pft_detail

// Constructs the lattice model with its per-site solved constraints and the
// identity inertial frame (clock x^0 = t, x^a = z^a).
inline ModelSystem make_lattice_pft(const LatticePftParams& params);

// Inertial frame for a (D+1) x (D+1) Lorentz matrix L: gauge conditions
// X^A(site) = L^A_0 t + L^A_a z^a(site).
inline std::shared_ptr<GaugeFrame> pft_inertial_frame(const ModelSystem& model,
                                                      const Matrix& L,
                                                      const std::string& name) {
    const LatticeLayout layout = lattice_layout(model);
    const auto n_embed = static_cast<Eigen::Index>(layout.n_embedding());
    if (L.rows() != n_embed || L.cols() != n_embed) {
        throw ConfigError("pft_inertial_frame: Lorentz matrix must be " +
                          std::to_string(n_embed) + "x" + std::to_string(n_embed));
    }
    Matrix eta = Matrix::Identity(n_embed, n_embed);
    eta(0, 0) = -1.0;
    const double defect = (L.transpose() * eta * L - eta).cwiseAbs().maxCoeff();
    if (defect > 1e-10) {
        throw ConfigError("pft_inertial_frame: matrix is not Lorentz (defect " +
                          std::to_string(defect) + ")");
    }

    const auto identity = model.frame("identity");
    auto frame = std::make_shared<GaugeFrame>();
    frame->name = name;
    frame->split = identity->split;
    frame->constraints = identity->constraints;
    const std::size_t S = layout.n_sites();
    frame->clocks.reserve(layout.n_embedding() * S);
    for (std::size_t A = 0; A < layout.n_embedding(); ++A) {
        for (std::size_t s = 0; s < S; ++s) {
            const Vector z = layout.position(s);
            double offset = 0.0;
            for (int a = 0; a < layout.dim; ++a) {
                offset += L(static_cast<Eigen::Index>(A), a + 1) * z[a];
            }
            frame->clocks.push_back(
                GaugeClock::linear(offset, L(static_cast<Eigen::Index>(A), 0)));
        }
    }
    return frame;
}

// Standard Lorentz matrices: boost of given rapidity along z^1, and (D = 2)
// spatial rotation by an angle.
inline Matrix pft_boost_matrix(double rapidity, int dim = 1) {
    Matrix L = Matrix::Identity(dim + 1, dim + 1);
    L(0, 0) = std::cosh(rapidity);
    L(0, 1) = std::sinh(rapidity);
    L(1, 0) = std::sinh(rapidity);
    L(1, 1) = std::cosh(rapidity);
    return L;
}

inline Matrix pft_rotation_matrix(double angle) {
    Matrix L = Matrix::Identity(3, 3);
    L(1, 1) = std::cos(angle);
    L(1, 2) = -std::sin(angle);
    L(2, 1) = std::sin(angle);
    L(2, 2) = std::cos(angle);
    return L;
}

inline ModelSystem make_lattice_pft(const LatticePftParams& params) {
    const LatticeLayout layout = LatticeLayout::from(params);
    const std::size_t S = layout.n_sites();
    const std::size_t n_embed = layout.n_embedding();

    std::vector<std::string> positions(layout.n_pairs()), momenta(layout.n_pairs());
    for (std::size_t A = 0; A < n_embed; ++A) {
        for (std::size_t s = 0; s < S; ++s) {
            positions[A * S + s] = "X" + std::to_string(A) + "_" + std::to_string(s);
            momenta[A * S + s] = "Pi" + std::to_string(A) + "_" + std::to_string(s);
        }
    }
    for (std::size_t s = 0; s < S; ++s) {
        positions[n_embed * S + s] = "phi_" + std::to_string(s);
        momenta[n_embed * S + s] = "pi_" + std::to_string(s);
    }
    auto pairs = PairStructure::make(positions, momenta, 1.0 / layout.cell_volume());

    ModelSystem model;
    model.kind = "lattice_pft";
    model.pairs = pairs;
    model.params = params;

    const double mu = params.mu;
    const double vol = layout.cell_volume();

    std::vector<ScalarField> solved(n_embed * S);
    for (std::size_t A = 0; A < n_embed; ++A) {
        for (std::size_t s = 0; s < S; ++s) {
            ScalarField h;
            h.label = "h" + std::to_string(A) + "_" + std::to_string(s);
            h.eval = [layout, A, s, mu, vol](const PhasePoint& z) {
                const Vector& c = z.coords;
                if (pft_detail::matter_absent(layout, c, s)) return 0.0;
                const LatticeGeometry geo = lattice_geometry(layout, c, s);
                const double phi = c[layout.phi_slot(s)];
                const double pi = c[layout.pi_slot(s)];
                Vector dphi(layout.dim);
                for (int a = 0; a < layout.dim; ++a) {
                    dphi[a] = layout.diff(c, layout.phi_slot(0), s, a);
                }
                const double gradient_sq = dphi.dot(geo.inverse_metric * dphi);
                const double Z =
                    0.5 * (pi * pi / geo.det + gradient_sq + mu * mu * phi * phi);
                // q^{ab} (eta X_{,a})_A Z_b with Z_b = pi phi_{,b}
                double momentum_term = 0.0;
                for (int a = 0; a < layout.dim; ++a) {
                    for (int b = 0; b < layout.dim; ++b) {
                        const double eta_x = (A == 0 ? -1.0 : 1.0) *
                                             geo.deriv(static_cast<Eigen::Index>(A), a);
                        momentum_term +=
                            geo.inverse_metric(a, b) * eta_x * pi * dphi[b];
                    }
                }
                return vol * (geo.normal[static_cast<Eigen::Index>(A)] * Z +
                              momentum_term);
            };
            solved[A * S + s] = std::move(h);
        }
    }

    std::vector<std::size_t> gauge_pairs(n_embed * S);
    for (std::size_t i = 0; i < gauge_pairs.size(); ++i) gauge_pairs[i] = i;
    auto split = std::make_shared<const CoordinateSplit>(pairs, gauge_pairs);

    auto frame = std::make_shared<GaugeFrame>();
    frame->name = "identity";
    frame->split = split;
    frame->constraints.solved = std::move(solved);
    frame->constraints.branch =
        BranchSigns{std::vector<BranchSign>(n_embed * S, BranchSign::single)};
    frame->constraints.finalize(*split);
    // The constraints are already linear in the embedding momenta, so the
    // abelianized forms double as the raw ones.
    frame->constraints.raw = frame->constraints.cbar;
    frame->clocks.reserve(n_embed * S);
    for (std::size_t A = 0; A < n_embed; ++A) {
        for (std::size_t s = 0; s < S; ++s) {
            double offset = 0.0;
            if (A >= 1) offset = layout.position(s)[static_cast<int>(A) - 1];
            frame->clocks.push_back(GaugeClock::linear(offset, A == 0 ? 1.0 : 0.0));
        }
    }
    model.frames.emplace(frame->name, frame);
    return model;
}

// Flat-slice generators as lattice sums with analytic gradients: the matter
// Hamiltonian h, the field momenta p_a, the boost generator kappa_B (weighted
// by z^1) and, for D = 2, the rotation generator kappa_R.
struct PftGenerators {
    ScalarField hamiltonian;
    std::vector<ScalarField> momentum;
    ScalarField boost;
    std::optional<ScalarField> rotation;
};

namespace pft_detail {

// phi_{,a} for all sites at once (zero padding).
inline std::vector<Vector> matter_derivatives(const LatticeLayout& layout,
                                              const Vector& coords,
                                              Eigen::Index base) {
    std::vector<Vector> d(layout.dim, Vector(layout.n_sites()));
    for (std::size_t s = 0; s < layout.n_sites(); ++s) {
        for (int a = 0; a < layout.dim; ++a) {
            d[a][static_cast<Eigen::Index>(s)] = layout.diff(coords, base, s, a);
        }
    }
    return d;
}

// Central difference of a per-site array (zero padding); adjoint to itself up
// to sign, which keeps the analytic gradients below exact on the lattice.
inline Vector array_diff(const LatticeLayout& layout, const Vector& values,
                         int axis) {
    Vector out(values.size());
    for (std::size_t s = 0; s < layout.n_sites(); ++s) {
        const long up = layout.neighbor(s, axis, +1);
        const long down = layout.neighbor(s, axis, -1);
        const double upper = up < 0 ? 0.0 : values[up];
        const double lower = down < 0 ? 0.0 : values[down];
        out[static_cast<Eigen::Index>(s)] = (upper - lower) / (2.0 * layout.spacing);
    }
    return out;
}

inline Vector site_weights(const LatticeLayout& layout, int axis) {
    Vector z(layout.n_sites());
    for (std::size_t s = 0; s < layout.n_sites(); ++s) {
        z[static_cast<Eigen::Index>(s)] =
            layout.axis_coordinate(layout.axis_index(s, axis));
    }
    return z;
}

inline Vector matter_values(const LatticeLayout& layout, const Vector& coords,
                            Eigen::Index base) {
    return coords.segment(base, static_cast<Eigen::Index>(layout.n_sites()));
}

}  // namespace pft_detail

inline PftGenerators pft_generators(const ModelSystem& model) {
    const LatticeLayout layout = lattice_layout(model);
    const double mu = std::get<LatticePftParams>(model.params).mu;
    const double vol = layout.cell_volume();
    const auto S = static_cast<Eigen::Index>(layout.n_sites());
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(layout.n_pairs());
    const Eigen::Index phi_base = layout.phi_slot(0);
    const Eigen::Index pi_base = layout.pi_slot(0);

    using pft_detail::array_diff;
    using pft_detail::matter_derivatives;
    using pft_detail::matter_values;
    using pft_detail::site_weights;

    PftGenerators out;

    out.hamiltonian.label = "pft_hamiltonian";
    out.hamiltonian.eval = [=](const PhasePoint& z) {
        const Vector phi = matter_values(layout, z.coords, phi_base);
        const Vector pi = matter_values(layout, z.coords, pi_base);
        const auto dphi = matter_derivatives(layout, z.coords, phi_base);
        double sum = pi.squaredNorm() + mu * mu * phi.squaredNorm();
        for (const Vector& d : dphi) sum += d.squaredNorm();
        return 0.5 * vol * sum;
    };
    out.hamiltonian.grad = [=](const PhasePoint& z) {
        const Vector phi = matter_values(layout, z.coords, phi_base);
        const Vector pi = matter_values(layout, z.coords, pi_base);
        const auto dphi = matter_derivatives(layout, z.coords, phi_base);
        Vector g = Vector::Zero(dim);
        Vector dphi_term = mu * mu * phi;
        for (int a = 0; a < layout.dim; ++a) {
            dphi_term -= array_diff(layout, dphi[static_cast<std::size_t>(a)], a);
        }
        g.segment(phi_base, S) = vol * dphi_term;
        g.segment(pi_base, S) = vol * pi;
        return g;
    };

    for (int a = 0; a < layout.dim; ++a) {
        ScalarField p;
        p.label = "pft_momentum_" + std::to_string(a + 1);
        p.eval = [=](const PhasePoint& z) {
            const Vector pi = matter_values(layout, z.coords, pi_base);
            const auto dphi = matter_derivatives(layout, z.coords, phi_base);
            return vol * pi.dot(dphi[static_cast<std::size_t>(a)]);
        };
        p.grad = [=](const PhasePoint& z) {
            const Vector pi = matter_values(layout, z.coords, pi_base);
            const auto dphi = matter_derivatives(layout, z.coords, phi_base);
            Vector g = Vector::Zero(dim);
            g.segment(phi_base, S) = -vol * array_diff(layout, pi, a);
            g.segment(pi_base, S) = vol * dphi[static_cast<std::size_t>(a)];
            return g;
        };
        out.momentum.push_back(std::move(p));
    }

    out.boost.label = "pft_boost";
    out.boost.eval = [=](const PhasePoint& z) {
        const Vector phi = matter_values(layout, z.coords, phi_base);
        const Vector pi = matter_values(layout, z.coords, pi_base);
        const auto dphi = matter_derivatives(layout, z.coords, phi_base);
        const Vector z1 = site_weights(layout, 0);
        Vector density =
            pi.cwiseProduct(pi) + mu * mu * phi.cwiseProduct(phi);
        for (const Vector& d : dphi) density += d.cwiseProduct(d);
        return 0.5 * vol * z1.dot(density);
    };
    out.boost.grad = [=](const PhasePoint& z) {
        const Vector phi = matter_values(layout, z.coords, phi_base);
        const Vector pi = matter_values(layout, z.coords, pi_base);
        const auto dphi = matter_derivatives(layout, z.coords, phi_base);
        const Vector z1 = site_weights(layout, 0);
        Vector g = Vector::Zero(dim);
        Vector phi_term = mu * mu * z1.cwiseProduct(phi);
        for (int a = 0; a < layout.dim; ++a) {
            phi_term -= array_diff(
                layout, z1.cwiseProduct(dphi[static_cast<std::size_t>(a)]), a);
        }
        g.segment(phi_base, S) = vol * phi_term;
        g.segment(pi_base, S) = vol * z1.cwiseProduct(pi);
        return g;
    };

    if (layout.dim == 2) {
        ScalarField rot;
        rot.label = "pft_rotation";
        rot.eval = [=](const PhasePoint& z) {
            const Vector pi = matter_values(layout, z.coords, pi_base);
            const auto dphi = matter_derivatives(layout, z.coords, phi_base);
            const Vector z1 = site_weights(layout, 0);
            const Vector z2 = site_weights(layout, 1);
            return vol * pi.dot(z1.cwiseProduct(dphi[1]) - z2.cwiseProduct(dphi[0]));
        };
        rot.grad = [=](const PhasePoint& z) {
            const Vector pi = matter_values(layout, z.coords, pi_base);
            const auto dphi = matter_derivatives(layout, z.coords, phi_base);
            const Vector z1 = site_weights(layout, 0);
            const Vector z2 = site_weights(layout, 1);
            Vector g = Vector::Zero(dim);
            g.segment(phi_base, S) =
                vol * (array_diff(layout, z2.cwiseProduct(pi), 0) -
                       array_diff(layout, z1.cwiseProduct(pi), 1));
            g.segment(pi_base, S) =
                vol * (z1.cwiseProduct(dphi[1]) - z2.cwiseProduct(dphi[0]));
            return g;
        };
        out.rotation = std::move(rot);
    }
    return out;
}

// Truncated Gaussian packet sampled on the lattice; exactly zero beyond
// cutoff standard deviations so the guard band stays exactly empty.
inline Vector gaussian_packet(const LatticeLayout& layout, const Vector& center,
                              double sigma, double amplitude, double cutoff = 8.5) {
    if (center.size() != layout.dim) {
        throw ConfigError("gaussian_packet: center dimension mismatch");
    }
    if (!(sigma > 0.0)) {
        throw ConfigError("gaussian_packet: sigma must be positive");
    }
    Vector values = Vector::Zero(static_cast<Eigen::Index>(layout.n_sites()));
    for (std::size_t s = 0; s < layout.n_sites(); ++s) {
        const double u = (layout.position(s) - center).norm() / sigma;
        if (u < cutoff) {
            values[static_cast<Eigen::Index>(s)] = amplitude * std::exp(-0.5 * u * u);
        }
    }
    return values;
}

// Kinematical lattice point with a caller-supplied embedding z -> X^A, the
// given matter content, and vanishing embedding momenta.
inline PhasePoint lattice_point(const ModelSystem& model,
                                const std::function<Vector(const Vector&)>& embedding,
                                const Vector& phi, const Vector& pi) {
    const LatticeLayout layout = lattice_layout(model);
    const auto S = static_cast<Eigen::Index>(layout.n_sites());
    if (phi.size() != S || pi.size() != S) {
        throw ConfigError("lattice_point: matter vectors must have one entry per site");
    }
    Vector coords = Vector::Zero(2 * static_cast<Eigen::Index>(layout.n_pairs()));
    for (std::size_t s = 0; s < layout.n_sites(); ++s) {
        const Vector x = embedding(layout.position(s));
        if (x.size() != static_cast<Eigen::Index>(layout.n_embedding())) {
            throw ConfigError("lattice_point: embedding must produce dim+1 components");
        }
        for (std::size_t A = 0; A < layout.n_embedding(); ++A) {
            coords[layout.x_slot(A, s)] = x[static_cast<Eigen::Index>(A)];
        }
        coords[layout.phi_slot(s)] = phi[static_cast<Eigen::Index>(s)];
        coords[layout.pi_slot(s)] = pi[static_cast<Eigen::Index>(s)];
    }
    return PhasePoint{coords, model.pairs};
}

// Largest matter magnitude inside the guard band.
inline double guard_band_magnitude(const LatticeLayout& layout, const PhasePoint& z) {
    double worst = 0.0;
    for (std::size_t s = 0; s < layout.n_sites(); ++s) {
        if (!layout.in_guard_band(s)) continue;
        worst = std::max(worst, std::abs(z.coords[layout.phi_slot(s)]));
        worst = std::max(worst, std::abs(z.coords[layout.pi_slot(s)]));
    }
    return worst;
}

inline void require_interior_support(const LatticeLayout& layout, const PhasePoint& z,
                                     double threshold, const std::string& stage) {
    const double worst = guard_band_magnitude(layout, z);
    if (worst > threshold) {
        throw SupportEscape(stage + ": matter magnitude " + std::to_string(worst) +
                            " inside the boundary guard band");
    }
}

// Boost identity check: flows the configuration along kappa_B for parameter
// s0 and compares the matter Hamiltonian at the image against
// cosh(s0) H + sinh(s0) P of the initial data.
struct BoostCheck {
    double flowed = 0.0;    // H at the kappa_B flow image
    double expected = 0.0;  // cosh(s0) H + sinh(s0) P
    double absolute = 0.0;
    double relative = 0.0;
};

inline BoostCheck verify_boost_hamiltonian(const ModelSystem& model, double s0,
                                           const Vector& phi, const Vector& pi,
                                           const Tolerances& tol = {},
                                           double support_threshold = 1e-10) {
    const LatticeLayout layout = lattice_layout(model);
    const PftGenerators gen = pft_generators(model);
    auto rest = [&](const Vector& z) {
        Vector x = Vector::Zero(static_cast<Eigen::Index>(layout.n_embedding()));
        x.tail(layout.dim) = z;
        return x;
    };
    const PhasePoint z0 = lattice_point(model, rest, phi, pi);
    require_interior_support(layout, z0, support_threshold, "verify_boost_hamiltonian");

    BoostCheck check;
    check.expected = std::cosh(s0) * gen.hamiltonian.eval(z0) +
                     std::sinh(s0) * gen.momentum[0].eval(z0);
    const PhasePoint image = hamiltonian_flow(gen.boost, z0, 0.0, s0, tol);
    require_interior_support(layout, image, support_threshold,
                             "verify_boost_hamiltonian (flow image)");
    check.flowed = gen.hamiltonian.eval(image);
    check.absolute = std::abs(check.flowed - check.expected);
    check.relative = check.absolute / std::max(1e-300, std::abs(check.expected));
    return check;
}

}  // namespace gaugeframe
