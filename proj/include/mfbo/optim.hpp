#pragma once

#include <functional>

#include "mfbo/search_space.hpp"

namespace mfbo::optim {

struct Result {
    Vector x;
    double f = 0.0;
    int evals = 0;
};

/// Objective for gradient-based minimization. When `grad` is non-null the
/// callee fills it; when null the callee may skip gradient work entirely.
using GradFn = std::function<double(const Vector&, Vector* grad)>;
using Fn = std::function<double(const Vector&)>;

struct LbfgsOptions {
    int max_iter = 80;
    int memory = 8;
    double grad_tol = 1e-6;
    double f_tol = 1e-10;
    Vector lower; // optional box, empty = unbounded
    Vector upper;
};

/// Limited-memory BFGS with Armijo backtracking. Non-finite trial values are
/// treated as rejections, so the objective may return +inf on invalid
/// parameters. With a box given, iterates are projected onto it.
Result lbfgs(const GradFn& fg, Vector x0, const LbfgsOptions& opts);

struct NelderMeadOptions {
    int max_evals = 400;
    double init_step = 0.05;
    double f_tol = 1e-12;
    Vector lower; // optional box
    Vector upper;
};

/// Downhill simplex minimization, used to polish acquisition optima.
Result nelder_mead(const Fn& f, Vector x0, const NelderMeadOptions& opts);

} // namespace mfbo::optim
