#include "supercal/mesh.hpp"

#include "gauss.hpp"

#include <cmath>

namespace supercal {

double SurfaceMesh::total_area() const {
    double a = 0.0;
    for (double w : weights) a += w;
    return a;
}

SurfaceMesh plane_mesh(int n, const std::vector<double>& origin,
                       const std::vector<Eigen::VectorXd>& tangent, double half_extent,
                       int resolution) {
    if (int(origin.size()) != n) throw InvalidArgument("plane_mesh: origin size != n");
    int d = int(tangent.size());
    if (d < 1 || d >= n) throw InvalidArgument("plane_mesh: tangent count must be 1..n-1");
    for (int a = 0; a < d; ++a) {
        if (tangent[a].size() != n) throw InvalidArgument("plane_mesh: tangent size != n");
        for (int b = 0; b <= a; ++b) {
            double dot = tangent[a].dot(tangent[b]);
            double want = (a == b) ? 1.0 : 0.0;
            if (std::abs(dot - want) > 1e-10)
                throw InvalidArgument("plane_mesh: tangent vectors must be orthonormal");
        }
    }
    SurfaceMesh mesh;
    mesh.n = n;
    mesh.dim = d;
    double cell = 2.0 * half_extent / resolution;
    double w = std::pow(cell, d);
    std::vector<int> idx(std::size_t(d), 0);
    while (true) {
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(origin.data(), n);
        for (int a = 0; a < d; ++a) {
            double t = -half_extent + (idx[std::size_t(a)] + 0.5) * cell;
            x += t * tangent[std::size_t(a)];
        }
        mesh.points.emplace_back(x.data(), x.data() + n);
        mesh.weights.push_back(w);
        int axis = d - 1;
        while (axis >= 0 && ++idx[std::size_t(axis)] == resolution) idx[std::size_t(axis--)] = 0;
        if (axis < 0) break;
    }
    return mesh;
}

SurfaceMesh sphere_mesh(double radius, int resolution) {
    if (!(radius > 0.0)) throw InvalidArgument("sphere_mesh: radius must be positive");
    const GaussRule& rule = gauss_legendre(std::max(2, resolution));
    int n_phi = 2 * std::max(2, resolution);
    SurfaceMesh mesh;
    mesh.n = 3;
    mesh.dim = 2;
    for (std::size_t iu = 0; iu < rule.nodes.size(); ++iu) {
        double u = rule.nodes[iu];
        double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (int j = 0; j < n_phi; ++j) {
            double phi = 2.0 * M_PI * (j + 0.5) / n_phi;
            mesh.points.push_back(
                {radius * s * std::cos(phi), radius * s * std::sin(phi), radius * u});
            mesh.weights.push_back(radius * radius * rule.weights[iu] * (2.0 * M_PI / n_phi));
        }
    }
    return mesh;
}

SurfaceMesh catenoid_mesh(double v_max, int u_resolution, int v_resolution) {
    if (!(v_max > 0.0)) throw InvalidArgument("catenoid_mesh: v_max must be positive");
    SurfaceMesh mesh;
    mesh.n = 3;
    mesh.dim = 2;
    double du = 2.0 * M_PI / u_resolution;
    double dv = 2.0 * v_max / v_resolution;
    for (int i = 0; i < u_resolution; ++i) {
        double u = (i + 0.5) * du;
        for (int j = 0; j < v_resolution; ++j) {
            double v = -v_max + (j + 0.5) * dv;
            double ch = std::cosh(v);
            mesh.points.push_back({ch * std::cos(u), ch * std::sin(u), v});
            mesh.weights.push_back(ch * ch * du * dv);
        }
    }
    return mesh;
}

SurfaceMesh line_mesh(const std::vector<double>& origin, const Eigen::VectorXd& dir,
                      double half_length, int resolution) {
    int n = int(origin.size());
    if (dir.size() != n) throw InvalidArgument("line_mesh: direction size != n");
    if (std::abs(dir.norm() - 1.0) > 1e-10)
        throw InvalidArgument("line_mesh: direction must be a unit vector");
    SurfaceMesh mesh;
    mesh.n = n;
    mesh.dim = 1;
    double dt = 2.0 * half_length / resolution;
    for (int i = 0; i < resolution; ++i) {
        double t = -half_length + (i + 0.5) * dt;
        std::vector<double> x(origin);
        for (int k = 0; k < n; ++k) x[std::size_t(k)] += t * dir[k];
        mesh.points.push_back(std::move(x));
        mesh.weights.push_back(dt);
    }
    return mesh;
}

ScalarField sphere_implicit(double radius) {
    std::vector<double> c(3, 0.0);
    return pow_field(squared_distance(3, c), 0.5) - ScalarField::constant(3, radius);
}

ScalarField catenoid_implicit() {
    DPoly r2(3);
    for (int i = 0; i < 2; ++i) {
        DPoly xi = DPoly::variable(3, i);
        r2 += xi * xi;
    }
    return pow_field(ScalarField::from_poly(3, r2), 0.5) -
           cosh_field(ScalarField::coordinate(3, 2));
}

std::vector<ScalarField> plane_implicit(int n, const std::vector<double>& origin,
                                        const std::vector<Eigen::VectorXd>& tangent) {
    int d = int(tangent.size());
    // complete the tangent frame to an orthonormal basis; the extra vectors give
    // affine defining functions
    Eigen::MatrixXd t(n, d);
    for (int a = 0; a < d; ++a) t.col(a) = tangent[std::size_t(a)];
    Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(t);
    Eigen::MatrixXd q = qr.matrixQ();
    std::vector<ScalarField> rho;
    for (int a = d; a < n; ++a) {
        Eigen::VectorXd nu = q.col(a);
        DPoly p(n);
        double c0 = 0.0;
        for (int i = 0; i < n; ++i) {
            p += DPoly::variable(n, i).scaled(nu[i]);
            c0 += nu[i] * origin[std::size_t(i)];
        }
        p.add_term(0, -c0);
        rho.push_back(ScalarField::from_poly(n, p));
    }
    return rho;
}

} // namespace supercal
