#pragma once

// Internal expression-tree nodes for ScalarField. Not installed.

#include "supercal/scalar_field.hpp"

#include <variant>

namespace supercal {

struct PolyNode {
    DPoly p;
};
struct RadialNode {
    std::vector<double> center;
    std::vector<RadialTermData> terms;
};
struct MaxAffineNode {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
};
// Component `var` of the a.e. gradient of a max-affine function; errors on ties.
struct MaxAffineGradNode {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    int var;
};
struct MollifiedNode {
    ScalarField base;
    double eps;
    std::vector<int> kernel_derivs;
    int order;
};
struct SampledNode {
    SampledData data;
};
struct SumNode {
    ScalarField a, b;
};
struct ProdNode {
    ScalarField a, b;
};
struct PowNode {
    ScalarField f;
    double s;
};
struct LogNode {
    ScalarField f;
};
struct ExpNode {
    ScalarField f;
};
struct SinNode {
    ScalarField f;
};
struct CosNode {
    ScalarField f;
};

struct ScalarField::Node {
    int n = 0;
    std::variant<PolyNode, RadialNode, MaxAffineNode, MaxAffineGradNode, MollifiedNode, SampledNode,
                 SumNode, ProdNode, PowNode, LogNode, ExpNode, SinNode, CosNode>
        v;
};

double eval_mollified(const MollifiedNode& m, int n, std::span<const double> x);

} // namespace supercal
