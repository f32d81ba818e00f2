#include "diffrefine/geometry.hpp"

#include <cmath>

#include "diffrefine/structure_io.hpp"

namespace diffrefine {

namespace {

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

Vec3 vee(const Mat3& m) {
    return Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

}  // namespace

Mat3 so3_exp(const Vec3& v) {
    const double theta = v.norm();
    const Mat3 k = skew(v);
    if (theta < 1e-8) {
        // sin(t)/t and (1-cos t)/t^2 by series; k is already O(theta)
        return Mat3::Identity() + k + 0.5 * k * k;
    }
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    return Mat3::Identity() + a * k + b * k * k;
}

Vec3 so3_log(const Mat3& r) {
    const Vec3 w = vee(r);        // = 2 sin(theta) * axis
    const double s = 0.5 * w.norm();
    const double c = 0.5 * (r.trace() - 1.0);
    const double theta = std::atan2(s, std::min(1.0, std::max(-1.0, c)));

    if (theta < 1e-4) {
        // theta/(2 sin theta) = 1/2 + theta^2/12 + O(theta^4)
        return (0.5 + theta * theta / 12.0) * w;
    }
    if (M_PI - theta < 1e-4) {
        // Near pi the vee part vanishes; recover the axis from the
        // symmetric part, whose dominant column is axis*axis^T's.
        const Mat3 sym = 0.5 * (r + r.transpose());
        const Mat3 outer = (sym - c * Mat3::Identity()) / (1.0 - c);
        int k = 0;
        outer.diagonal().maxCoeff(&k);
        Vec3 axis = outer.col(k).normalized();
        if (axis.dot(w) < 0) axis = -axis;  // w fixes the sign away from pi
        return theta * axis;
    }
    return (theta / (2.0 * std::sin(theta))) * w;
}

Mat3 geodesic_flow(double gamma, const Mat3& r) {
    return so3_exp(gamma * so3_log(r));
}

Mat3 nearest_rotation(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0) {
        Mat3 d = Mat3::Identity();
        d(2, 2) = -1.0;
        r = svd.matrixU() * d * svd.matrixV().transpose();
    }
    return r;
}

bool is_rotation(const Mat3& m, double tol) {
    return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() < tol &&
           std::abs(m.determinant() - 1.0) < tol;
}

Frame compose(const Frame& a, const Frame& b) {
    return Frame{a.rot * b.rot, a.rot * b.trans + a.trans};
}

Frame invert(const Frame& f) {
    Frame out;
    out.rot = f.rot.transpose();
    out.trans = -(out.rot * f.trans);
    return out;
}

const IdealTemplate& IdealTemplate::standard() {
    // Engh-Huber-style backbone geometry, v1. CA pinned at the origin,
    // C on +x, N in the xy-plane, O off the carbonyl carbon at 1.231 A
    // with a 120.8 deg CA-C-O angle.
    static const IdealTemplate tpl = [] {
        IdealTemplate t;
        t.coords[static_cast<int>(BackboneAtom::N)] = Vec3(-0.572, 1.337, 0.0);
        t.coords[static_cast<int>(BackboneAtom::CA)] = Vec3(0.0, 0.0, 0.0);
        t.coords[static_cast<int>(BackboneAtom::C)] = Vec3(1.517, 0.0, 0.0);
        const double ang = (180.0 - 120.8) * M_PI / 180.0;
        t.coords[static_cast<int>(BackboneAtom::O)] =
            Vec3(1.517 + 1.231 * std::cos(ang), -1.231 * std::sin(ang), 0.0);
        return t;
    }();
    return tpl;
}

FrameSet frames_from_backbone(const BackboneStructure& s) {
    FrameSet frames;
    frames.reserve(s.size());
    for (const Residue& res : s.residues) {
        const Vec3& n = res.atom(BackboneAtom::N);
        const Vec3& ca = res.atom(BackboneAtom::CA);
        const Vec3& c = res.atom(BackboneAtom::C);
        const Vec3 u = c - ca;
        const Vec3 v = n - ca;
        if (u.norm() < 0.1 || v.norm() < 0.1 || u.cross(v).norm() < 1e-6) {
            throw DegenerateResidue("collinear or coincident N/CA/C at residue " +
                                    std::to_string(res.seq_index));
        }
        const Vec3 e1 = u.normalized();
        const Vec3 e2 = (v - v.dot(e1) * e1).normalized();
        Frame f;
        f.rot.col(0) = e1;
        f.rot.col(1) = e2;
        f.rot.col(2) = e1.cross(e2);
        f.trans = ca;
        frames.push_back(f);
    }
    return frames;
}

BackboneStructure atoms_from_frames(const FrameSet& p, const IdealTemplate& tpl,
                                    const std::vector<char>& seq) {
    BackboneStructure s;
    s.source = "frames";
    s.residues.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        Residue& res = s.residues[i];
        res.seq_index = static_cast<int>(i) + 1;
        res.aa = i < seq.size() ? seq[i] : 'A';
        for (int a = 0; a < kBackboneAtomCount; ++a) {
            res.atoms[a] = apply(p[i], tpl.coords[a]);
        }
    }
    return s;
}

}  // namespace diffrefine
