#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace cavsim {

using cplx = std::complex<double>;

enum class Closure { mean_field, second_order };

// Position of every dynamical variable in the flat real state vector.
//
// Second order:
//   [a.re, a.im, {sm}, n_phot, {a_sp}, {pop}, {pair m<j row-major}, {x}, {y}, {px}, {py},
//    (b.re, b.im, n_phot_b, {b_sp}, ab.re, ab.im)]
// Mean field:
//   [a.re, a.im, {sm}, {pop}, {x}, {y}, {px}, {py}, (b.re, b.im)]
//
// Complex entries occupy two consecutive doubles (re, im). The pair block
// stores <sigma+_m sigma-_j> for m < j only; the (j, m) entry is its conjugate.
// The parenthesised tail is present only in two-mode (filter cavity) layouts.
struct StateLayout {
  int n_atoms = 0;
  Closure closure = Closure::second_order;
  bool two_mode = false;

  std::size_t a = 0, sm = 0, n_phot = 0, a_sp = 0, pop = 0, pair = 0;
  std::size_t x = 0, y = 0, px = 0, py = 0;
  std::size_t b = 0, n_phot_b = 0, b_sp = 0, ab = 0;
  std::size_t size = 0;

  StateLayout() = default;
  StateLayout(int n_atoms, Closure closure, bool two_mode);

  bool second_order() const { return closure == Closure::second_order; }
  std::size_t n_pairs() const;
  // Index into the pair block for m < j.
  std::size_t pair_index(int m, int j) const;

  // One name per real slot, in layout order (e.g. "a_re", "pair_0_1_im").
  std::vector<std::string> column_names() const;

  friend bool operator==(const StateLayout&, const StateLayout&) = default;
};

// Typed access to the blocks of a flat state. D is double or const double.
template <class D>
class MomentView {
 public:
  using C = std::conditional_t<std::is_const_v<D>, const cplx, cplx>;

  MomentView(const StateLayout& layout, std::span<D> data) : l_(&layout), d_(data) {}

  C& a() const { return cz(l_->a); }
  std::span<C> sm() const { return cs(l_->sm, l_->n_atoms); }
  D& n_phot() const { return d_[l_->n_phot]; }
  std::span<C> a_sp() const { return cs(l_->a_sp, l_->n_atoms); }
  std::span<D> pop() const { return rs(l_->pop); }
  std::span<C> pair() const { return cs(l_->pair, l_->n_pairs()); }
  std::span<D> x() const { return rs(l_->x); }
  std::span<D> y() const { return rs(l_->y); }
  std::span<D> px() const { return rs(l_->px); }
  std::span<D> py() const { return rs(l_->py); }
  C& b() const { return cz(l_->b); }
  D& n_phot_b() const { return d_[l_->n_phot_b]; }
  std::span<C> b_sp() const { return cs(l_->b_sp, l_->n_atoms); }
  C& ab() const { return cz(l_->ab); }

  const StateLayout& layout() const { return *l_; }
  std::span<D> raw() const { return d_; }

 private:
  C& cz(std::size_t off) const { return *reinterpret_cast<C*>(d_.data() + off); }
  std::span<C> cs(std::size_t off, std::size_t n) const {
    return {reinterpret_cast<C*>(d_.data() + off), n};
  }
  std::span<D> rs(std::size_t off) const {
    return d_.subspan(off, static_cast<std::size_t>(l_->n_atoms));
  }

  const StateLayout* l_;
  std::span<D> d_;
};

using StateRef = MomentView<double>;
using ConstStateRef = MomentView<const double>;

}  // namespace cavsim
