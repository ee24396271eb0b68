// Effective tensors of the built-in coefficient catalog, with their Voigt-Reuss brackets.

#include <cstdio>

#include "homog/cell.hpp"

int main() {
  for (const auto& spec : homog::catalog_specs()) {
    const auto field = homog::make_coefficient(spec);
    const auto cell = homog::solve_cell(field, spec.dim == 1 ? 256 : 64);
    const auto K0 = homog::effective_tensor(cell);
    const auto bounds = homog::voigt_reuss(*cell.problem);
    std::printf("%-16s dim=%d  K0 =", field.name().c_str(), spec.dim);
    for (int i = 0; i < spec.dim; ++i)
      for (int j = 0; j < spec.dim; ++j) std::printf(" %.6f", K0(i, j));
    std::printf("  harmonic(0,0)=%.6f arithmetic(0,0)=%.6f\n", bounds.harmonic(0, 0), bounds.arithmetic(0, 0));
  }
}
