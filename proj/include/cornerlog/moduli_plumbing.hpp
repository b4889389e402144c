#pragma once

// Desk-scale stable marked disks and spheres: nodal trees, smoothing of the
// nodes by plumbing, and Moebius normal forms of the result.
//
// Disks are modelled on the closed upper half plane, spheres on C (all
// special points finite). A node joins a parent component (closer to the
// root) and a child component. Each branch carries an analytic coordinate
// kappa(u) = lambda u (1 + a1 u + a2 u^2), u = x - (node position), and the
// node is smoothed by z w = sigma (interior) or z w = -r (boundary), where
// z is the parent branch coordinate and w the linear part lambda u of the
// child's (the nonlinear child terms would deform the bubble itself).

#include "cornerlog/gluing_coords.hpp"
#include "cornerlog/numeric.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cornerlog {

class DegenerateGaugeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class ComponentKind { disk, sphere };

inline const char* to_string(ComponentKind k) { return k == ComponentKind::disk ? "disk" : "sphere"; }

struct CoordFamily {
    cplx<double> lambda{1.0, 0.0};
    cplx<double> a1{0.0, 0.0};
    cplx<double> a2{0.0, 0.0};
    double radius = 0.0;  // 0 selects min(0.99 * max_radius(), 4)

    /// Largest R with 2|a1|R + 3|a2|R^2 <= 1, where kappa' cannot vanish.
    double max_radius() const;
    double validity_radius() const;
    void validate(bool boundary_branch) const;
    bool is_identity() const;

    template <class R>
    cplx<R> apply(const cplx<R>& u) const;
    /// Inverse on the validity disk; throws RangeError when |result| leaves it.
    template <class R>
    cplx<R> invert(const cplx<R>& z) const;
};

struct Component {
    ComponentKind kind = ComponentKind::disk;
    std::string name;
};

struct MarkedPoint {
    bool boundary = true;
    int index = 0;
    int component = 0;
    cplx<double> position;
    bool free_re = false;  // real part is a chart coordinate
    bool free_im = false;  // imaginary part is a chart coordinate
};

struct Node {
    NodeKind kind = NodeKind::interior;
    int parent = 0;
    int child = 1;
    cplx<double> parent_position;
    cplx<double> child_position;
    CoordFamily parent_family;
    CoordFamily child_family;
};

struct StableTree {
    std::vector<Component> components;
    std::vector<Node> nodes;
    std::vector<MarkedPoint> marked;

    int boundary_marked_count() const;
    int interior_marked_count() const;
    std::size_t boundary_node_count() const;
    std::size_t interior_node_count() const;
    /// Position of node n among the nodes of its kind (gluing parameter slot).
    std::size_t parameter_slot(std::size_t n) const;
    /// Component holding boundary marked point 0, or component 0 when there is none.
    int root() const;
};

/// Every stability / planarity violation; empty iff the tree is valid.
std::vector<std::string> validate(const StableTree& tree);

struct ChartCenter {
    std::string name;
    StableTree tree;
    double cutoff = kDefaultCutoff;

    std::size_t free_dimension() const;
    /// Free coordinates at the center itself.
    std::vector<double> center_v() const;
    void validate() const;  // throws DomainError listing the violations
};

// ---------------------------------------------------------------------------
// Configurations after plumbing

enum class SpecialKind { boundary_marked, interior_marked, boundary_node, interior_node };

template <class R>
struct SpecialPoint {
    SpecialKind kind = SpecialKind::boundary_marked;
    std::string label;  // "b3", "i0", or "node[b2 b3]" (child-side marked set)
    cplx<R> position;
};

template <class R>
struct Piece {
    ComponentKind kind = ComponentKind::disk;
    std::vector<int> components;
    std::vector<SpecialPoint<R>> points;
    std::string label() const;
};

template <class R>
struct Configuration {
    std::vector<Piece<R>> pieces;
    std::vector<int> nodal;  // indices of the nodes left unsmoothed
    std::string type() const;
};

template <class R>
struct PieceCoords {
    std::string label;
    ComponentKind kind = ComponentKind::disk;
    std::vector<std::string> names;
    std::vector<R> values;
};

template <class R>
struct ModuliCoords {
    std::vector<PieceCoords<R>> pieces;
    std::string type;

    std::vector<R> flatten() const;
};

/// Gluing parameters in the working type; zero leaves the node unsmoothed.
template <class R>
struct GluingParams {
    std::vector<R> boundary;
    std::vector<cplx<R>> interior;
};

template <class R>
GluingParams<R> gluing_from_log(const std::vector<R>& boundary_T, const std::vector<R>& interior_T,
                                const std::vector<R>& interior_theta);

/// ((z1 - z3)(z2 - z4)) / ((z1 - z4)(z2 - z3)); infinite arguments (real part
/// +-inf) are handled by taking limits. Sends z1, z2, z3 to inf, 0, 1.
template <class R>
cplx<R> cross_ratio(const cplx<R>& z1, const cplx<R>& z2, const cplx<R>& z3, const cplx<R>& z4);

template <class R>
Configuration<R> plumb(const ChartCenter& center, const std::vector<R>& v, const GluingParams<R>& params);

template <class R>
ModuliCoords<R> normalize(const Configuration<R>& config);

template <class R>
ModuliCoords<R> chart_map(const ChartCenter& center, const std::vector<R>& v, const GluingParams<R>& params) {
    return normalize(plumb(center, v, params));
}

/// Double-precision entry points.
Configuration<double> plumb(const ChartCenter& center, const NodeParams& params);
ModuliCoords<double> chart_map_Phi(const ChartCenter& center, const std::vector<double>& v, const NodeParams& params);
ModuliCoords<double> chart_map_Psi(const ChartCenter& center, const std::vector<double>& v, const DoubleLogCoords& d);

/// Built-in centers: two-sphere, two-sphere-5, sphere-chain, disk-3, disk-4,
/// disk-1-1, disk-2-1, disk-1-2, mixed-2-2.
ChartCenter builtin_center(const std::string& name);
std::vector<std::string> builtin_center_names();

}  // namespace cornerlog
