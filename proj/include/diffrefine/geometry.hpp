#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <vector>

namespace diffrefine {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Per-residue rigid transform. rot must stay orthogonal with det +1;
// helpers below never produce anything else from valid inputs.
struct Frame {
    Mat3 rot = Mat3::Identity();
    Vec3 trans = Vec3::Zero();
};

// Ordered per-residue frames, index order = residue order.
using FrameSet = std::vector<Frame>;

struct DegenerateResidue : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rodrigues exponential. Axis-angle vector in radians; |v| = 0 gives identity.
Mat3 so3_exp(const Vec3& v);

// Principal-branch log, |result| in [0, pi]. Stable near both branch ends:
// a 2-term series below angle 1e-4 and the symmetric-part eigenvector
// extraction within 1e-4 of pi.
Vec3 so3_log(const Mat3& r);

// exp(gamma * log(r)): interpolation from the identity toward r.
Mat3 geodesic_flow(double gamma, const Mat3& r);

// Projects an almost-orthogonal matrix back onto SO(3) (polar factor).
Mat3 nearest_rotation(const Mat3& m);

bool is_rotation(const Mat3& m, double tol = 1e-9);

Frame compose(const Frame& a, const Frame& b);
Frame invert(const Frame& f);

inline Vec3 apply(const Frame& f, const Vec3& x) { return f.rot * x + f.trans; }
inline Vec3 to_local(const Frame& f, const Vec3& x) {
    return f.rot.transpose() * (x - f.trans);
}

enum class BackboneAtom { N = 0, CA = 1, C = 2, O = 3 };
inline constexpr int kBackboneAtomCount = 4;

// Idealized backbone atom positions in the residue frame, CA at the origin.
// Values are Engh-Huber-style literature geometry; see standard() for the
// versioned constant set.
struct IdealTemplate {
    std::array<Vec3, kBackboneAtomCount> coords;

    const Vec3& at(BackboneAtom a) const { return coords[static_cast<int>(a)]; }
    static const IdealTemplate& standard();
};

// Literature peptide C-N bond length used by the bond loss and the
// synthetic-structure builder.
inline constexpr double kPeptideBondLength = 1.329;

struct BackboneStructure;

// Gram-Schmidt frames from N/CA/C: translation = CA, first axis along
// C-CA, second from N-CA orthogonalized. Throws DegenerateResidue when the
// three atoms are collinear (cross-product norm below 1e-6) or an
// N-CA / C-CA separation is under 0.1 A.
FrameSet frames_from_backbone(const BackboneStructure& s);

// Places template atoms under each frame: x = rot * tpl + trans.
// seq, when non-empty, supplies per-residue amino-acid letters (else 'A').
BackboneStructure atoms_from_frames(const FrameSet& p, const IdealTemplate& tpl,
                                    const std::vector<char>& seq = {});

}  // namespace diffrefine
