#include "rsmrac/models.hpp"

#include <cmath>
#include <sstream>

namespace rsm {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ModelError(msg);
}

Mat kron(const Mat& A, const Mat& B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

}  // namespace

bool is_hurwitz(const Mat& A) {
    if (A.rows() != A.cols() || A.rows() == 0) return false;
    Eigen::EigenSolver<Mat> es(A, false);
    return (es.eigenvalues().real().array() < 0.0).all();
}

double spectral_norm(const Mat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(0);
}

PlantModel PlantModel::make(const Mat& A_p, const Mat& B_p, const Vec& lambda_diag) {
    require(A_p.rows() == A_p.cols(), "plant: A_p must be square");
    require(B_p.rows() == A_p.rows(), "plant: B_p row count must match A_p");
    require(lambda_diag.size() == B_p.cols(), "plant: lambda size must equal input dimension m");
    for (Eigen::Index i = 0; i < lambda_diag.size(); ++i) {
        if (!(lambda_diag(i) > 0.0)) {
            std::ostringstream os;
            os << "plant: lambda[" << i << "] must be positive, got " << lambda_diag(i);
            throw ModelError(os.str());
        }
    }
    Eigen::ColPivHouseholderQR<Mat> qr(B_p);
    require(qr.rank() == B_p.cols(), "plant: B_p must have full column rank");
    PlantModel p;
    p.A_p = A_p;
    p.B_p = B_p;
    p.Lambda = lambda_diag.asDiagonal();
    return p;
}

ReferenceModel ReferenceModel::make(const Mat& A_m, const Mat& B_m) {
    require(A_m.rows() == A_m.cols(), "reference: A_m must be square");
    require(B_m.rows() == A_m.rows(), "reference: B_m row count must match A_m");
    require(is_hurwitz(A_m), "reference: A_m must be Hurwitz");
    ReferenceModel r;
    r.A_m = A_m;
    r.B_m = B_m;
    return r;
}

Mat quadrotor_nominal_A(double drag) {
    Mat A = Mat::Zero(6, 6);
    A.topRightCorner(3, 3).setIdentity();
    A.bottomRightCorner(3, 3) = -drag * Mat::Identity(3, 3);
    return A;
}

Mat quadrotor_B() {
    Mat B = Mat::Zero(6, 3);
    B.bottomRows(3).setIdentity();
    return B;
}

PlantModel build_quadrotor_plant(const Mat& delta_A, const Vec& lambda_diag,
                                 double drag, MismatchMode mode) {
    Mat A_nom = quadrotor_nominal_A(drag);
    Mat D;
    if (mode == MismatchMode::Full) {
        require(delta_A.rows() == 6 && delta_A.cols() == 6, "plant: mismatch matrix must be 6x6");
        D = delta_A;
    } else {
        require((delta_A.rows() == 3 && delta_A.cols() == 3) ||
                    (delta_A.rows() == 6 && delta_A.cols() == 6),
                "plant: velocity-row mismatch must be 3x3 or 6x6");
        D = Mat::Identity(6, 6);
        if (delta_A.rows() == 3)
            D.bottomRightCorner(3, 3) = delta_A;
        else
            D.bottomRows(3) = delta_A.bottomRows(3);
    }
    return PlantModel::make(D * A_nom, quadrotor_B(), lambda_diag);
}

PlantModel build_quadrotor_plant(double delta_scale, const Vec& lambda_diag,
                                 double drag, MismatchMode mode) {
    int k = mode == MismatchMode::Full ? 6 : 3;
    return build_quadrotor_plant(Mat(delta_scale * Mat::Identity(k, k)), lambda_diag, drag, mode);
}

ReferenceModel build_quadrotor_reference(double kp, double kd) {
    Mat A = Mat::Zero(6, 6);
    A.topRightCorner(3, 3).setIdentity();
    A.bottomLeftCorner(3, 3) = -kp * Mat::Identity(3, 3);
    A.bottomRightCorner(3, 3) = -kd * Mat::Identity(3, 3);
    return ReferenceModel::make(A, quadrotor_B());
}

MatchingGains solve_matching_gains(const PlantModel& plant, const ReferenceModel& ref,
                                   double tol) {
    require(plant.n() == ref.n(), "matching: plant and reference state dimensions differ");
    Mat BL = plant.B_p * plant.Lambda;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(BL);
    MatchingGains g;
    g.theta_x = cod.solve(Mat(ref.A_m - plant.A_p));
    g.theta_r = cod.solve(ref.B_m);
    g.residual_x = (plant.A_p + BL * g.theta_x - ref.A_m).norm();
    g.residual_r = (BL * g.theta_r - ref.B_m).norm();
    g.residual = std::hypot(g.residual_x, g.residual_r);
    if (g.residual_x > tol || g.residual_r > tol) {
        std::ostringstream os;
        os << "matching: residual " << g.residual << " exceeds tolerance " << tol
           << " (no ideal gains for this plant/reference pair)";
        throw MatchingInfeasible(os.str());
    }
    return g;
}

Vec plant_dynamics(const PlantModel& plant, const Vec& x, const Vec& u) {
    require(x.size() == plant.n() && u.size() == plant.m(), "plant_dynamics: dimension mismatch");
    return plant.A_p * x + plant.B_p * (plant.Lambda * u);
}

Vec reference_dynamics(const ReferenceModel& ref, const Vec& x_m, const Vec& r) {
    require(x_m.size() == ref.n() && r.size() == ref.p(), "reference_dynamics: dimension mismatch");
    return ref.A_m * x_m + ref.B_m * r;
}

Mat solve_lyapunov(const Mat& A_m, const Mat& Q) {
    const Eigen::Index n = A_m.rows();
    require(A_m.cols() == n && Q.rows() == n && Q.cols() == n, "lyapunov: dimension mismatch");
    require(is_hurwitz(A_m), "lyapunov: A_m must be Hurwitz");
    Mat I = Mat::Identity(n, n);
    Mat At = A_m.transpose();
    // column-major vec: vec(At P) = (I kron At) vec(P), vec(P A) = (A^T kron I) vec(P)
    Mat K = kron(I, At) + kron(At, I);
    Vec q = -Eigen::Map<const Vec>(Q.data(), n * n);
    Vec pv = K.partialPivLu().solve(q);
    Mat P = Eigen::Map<Mat>(pv.data(), n, n);
    P = 0.5 * (P + P.transpose());
    double res = (At * P + P * A_m + Q).norm();
    if (res > 1e-9 * std::max(1.0, Q.norm())) {
        std::ostringstream os;
        os << "lyapunov: residual " << res << " above tolerance";
        throw ModelError(os.str());
    }
    return P;
}

}  // namespace rsm
