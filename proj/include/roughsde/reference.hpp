#pragma once

#include "roughsde/frac_calc.hpp"
#include "roughsde/grid_path.hpp"

// Serial reference implementations of the O(n^2) kernels, written as direct
// transcriptions of the defining sums with no blocking, threading, or table
// reuse. The production kernels must match these bitwise (same floating-point
// operation order per output element); test_reference_parity enforces it and
// bench_kernels measures the gap.
namespace roughsde::ref {

GridPath rl_integral(const GridPath& f, FractionalOrder order, Side side);
GridPath wm_derivative(const GridPath& f, FractionalOrder order, Side side,
                       bool subtract_terminal = false);
double gagliardo_seminorm(const GridPath& f, FractionalOrder order, double p);
double holder_seminorm(const GridPath& path, double theta);

}  // namespace roughsde::ref
