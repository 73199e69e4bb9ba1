#include "cavsim/layout.hpp"

#include "cavsim/error.hpp"

namespace cavsim {

StateLayout::StateLayout(int n, Closure c, bool two) : n_atoms(n), closure(c), two_mode(two) {
  if (n < 0) throw Error("negative atom count");
  const auto un = static_cast<std::size_t>(n);
  std::size_t off = 0;
  a = off;
  off += 2;
  sm = off;
  off += 2 * un;
  if (second_order()) {
    n_phot = off;
    off += 1;
    a_sp = off;
    off += 2 * un;
  }
  pop = off;
  off += un;
  if (second_order()) {
    pair = off;
    off += 2 * n_pairs();
  }
  x = off;
  off += un;
  y = off;
  off += un;
  px = off;
  off += un;
  py = off;
  off += un;
  if (two_mode) {
    b = off;
    off += 2;
    if (second_order()) {
      n_phot_b = off;
      off += 1;
      b_sp = off;
      off += 2 * un;
      ab = off;
      off += 2;
    }
  }
  size = off;
}

std::size_t StateLayout::n_pairs() const {
  const auto un = static_cast<std::size_t>(n_atoms);
  return un < 2 ? 0 : un * (un - 1) / 2;
}

std::size_t StateLayout::pair_index(int m, int j) const {
  const auto um = static_cast<std::size_t>(m);
  const auto uj = static_cast<std::size_t>(j);
  const auto un = static_cast<std::size_t>(n_atoms);
  return um * (2 * un - um - 1) / 2 + (uj - um - 1);
}

std::vector<std::string> StateLayout::column_names() const {
  std::vector<std::string> names(size);
  auto put_c = [&](std::size_t off, const std::string& stem) {
    names[off] = stem + "_re";
    names[off + 1] = stem + "_im";
  };
  auto per_atom_c = [&](std::size_t off, const std::string& stem) {
    for (int m = 0; m < n_atoms; ++m) put_c(off + 2 * m, stem + "_" + std::to_string(m));
  };
  auto per_atom_r = [&](std::size_t off, const std::string& stem) {
    for (int m = 0; m < n_atoms; ++m) names[off + m] = stem + "_" + std::to_string(m);
  };
  put_c(a, "a");
  per_atom_c(sm, "sm");
  if (second_order()) {
    names[n_phot] = "n_phot";
    per_atom_c(a_sp, "a_sp");
  }
  per_atom_r(pop, "pop");
  if (second_order()) {
    for (int m = 0; m < n_atoms; ++m) {
      for (int j = m + 1; j < n_atoms; ++j) {
        put_c(pair + 2 * pair_index(m, j), "pair_" + std::to_string(m) + "_" + std::to_string(j));
      }
    }
  }
  per_atom_r(x, "x");
  per_atom_r(y, "y");
  per_atom_r(px, "px");
  per_atom_r(py, "py");
  if (two_mode) {
    put_c(b, "b");
    if (second_order()) {
      names[n_phot_b] = "n_phot_b";
      per_atom_c(b_sp, "b_sp");
      put_c(ab, "ab");
    }
  }
  return names;
}

}  // namespace cavsim
