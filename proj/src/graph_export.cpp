#include <string>

#include "mdobench/mdf.hpp"

namespace mdobench {

namespace {

bool structurally_nonzero(const Eigen::MatrixXd& block) {
  return block.size() > 0 && block.cwiseAbs().maxCoeff() > 0.0;
}

}  // namespace

std::string export_coupling_graph(const MdoProblem& problem) {
  const auto& coef = coefficients_of(problem.coupling());
  const int n = coef.num_disciplines();
  const int d0 = coef.x_block_sizes[0];

  std::string dot;
  dot += "digraph coupling {\n";
  dot += "  rankdir=LR;\n";

  // Design-variable nodes.
  for (int i = (d0 > 0 ? 0 : 1); i <= n; ++i) {
    dot += "  \"x_" + std::to_string(i) + "\" [shape=box];\n";
  }
  // Coupling-variable nodes.
  for (int i = 1; i <= n; ++i) {
    dot += "  \"y_" + std::to_string(i) + "\" [shape=diamond];\n";
  }
  // Function nodes.
  for (int i = 1; i <= n; ++i) {
    dot += "  \"h_" + std::to_string(i) + "\" [shape=circle];\n";
  }
  dot += "  \"L\" [shape=circle];\n";
  dot += "  \"f\" [shape=circle];\n";

  for (int i = 1; i <= n; ++i) {
    const auto idx = static_cast<std::size_t>(i - 1);
    if (d0 > 0 && structurally_nonzero(coef.b_shared[idx])) {
      dot += "  \"x_0\" -> \"h_" + std::to_string(i) + "\";\n";
    }
    if (structurally_nonzero(coef.b_local[idx])) {
      dot += "  \"x_" + std::to_string(i) + "\" -> \"h_" + std::to_string(i) + "\";\n";
    }
    for (int j = 1; j <= n; ++j) {
      if (j == i) continue;
      if (structurally_nonzero(coef.c[idx][static_cast<std::size_t>(j - 1)])) {
        dot += "  \"y_" + std::to_string(j) + "\" -> \"h_" + std::to_string(i) + "\";\n";
      }
    }
    dot += "  \"h_" + std::to_string(i) + "\" -> \"y_" + std::to_string(i) + "\";\n";
  }

  for (int i = (d0 > 0 ? 0 : 1); i <= n; ++i) {
    dot += "  \"x_" + std::to_string(i) + "\" -> \"L\";\n";
  }
  for (int i = 1; i <= n; ++i) {
    dot += "  \"y_" + std::to_string(i) + "\" -> \"L\";\n";
  }
  dot += "  \"L\" -> \"f\";\n";
  dot += "}\n";
  return dot;
}

}  // namespace mdobench
