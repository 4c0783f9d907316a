#pragma once

#include <string>

#include "mfglab/lq/mkv_solver.hpp"
#include "mfglab/lq/nplayer_decoupling.hpp"
#include "mfglab/tabular.hpp"

namespace mfglab::lq {

namespace detail {

inline void put_spec_meta(Table& t, const LqSpec& s) {
    t.set_meta("A", format_double(s.A));
    t.set_meta("Abar", format_double(s.Abar));
    t.set_meta("B", format_double(s.B));
    t.set_meta("Bbar", format_double(s.Bbar));
    t.set_meta("Q", format_double(s.Q));
    t.set_meta("Qbar", format_double(s.Qbar));
    t.set_meta("R", format_double(s.R));
    t.set_meta("Rbar", format_double(s.Rbar));
    t.set_meta("Sbar", format_double(s.Sbar));
    t.set_meta("QT", format_double(s.QT));
    t.set_meta("QbarT", format_double(s.QbarT));
    t.set_meta("sigma", format_double(s.sigma));
    t.set_meta("T", format_double(s.T));
    t.set_meta("mu0_mean", format_double(s.mu0_mean));
    t.set_meta("mu0_std", format_double(s.mu0_std));
}

}  // namespace detail

/// One row per grid node: t, eta, psi, m, n, var.
inline Table to_table(const MfgDecoupling& dec) {
    Table t;
    t.set_meta("object", "mfg-decoupling");
    t.set_meta("kind", dec.kind == LimitKind::mfg ? "mfg" : "cooperative");
    t.set_meta("substeps", std::to_string(dec.substeps));
    detail::put_spec_meta(t, dec.spec);
    t.set_columns({"t [time]", "eta [adjoint/state]", "psi [adjoint]", "m [state]",
                   "n [adjoint]", "var [state^2]"});
    for (int k = 0; k <= dec.grid.n_steps; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        t.add_row({dec.grid.node(k), dec.eta[ku], dec.psi[ku], dec.m[ku], dec.n[ku], dec.var[ku]});
    }
    return t;
}

/// Symmetric encodings serialize as one row per node with the scalar
/// families; dense-only decouplings are in-memory oracles and are not
/// serialized.
inline Table to_table(const NPlayerDecoupling& dec) {
    if (!dec.has_symmetric)
        throw SizeLimit("to_table: dense-only N-player decouplings are not serialized");
    Table t;
    t.set_meta("object", "nplayer-decoupling");
    t.set_meta("kind", dec.kind == GameKind::nash ? "nash" : "social");
    t.set_meta("N", std::to_string(dec.N));
    t.set_meta("substeps", std::to_string(dec.substeps));
    detail::put_spec_meta(t, dec.spec);
    t.set_columns({"t [time]", "a [adj/state]", "b [adj/state]", "c [adj]", "d [adj/state]",
                   "e [adj/state]", "f [adj/state]", "g [adj]"});
    for (int k = 0; k <= dec.grid.n_steps; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        t.add_row({dec.grid.node(k), dec.sym.a[ku], dec.sym.b[ku], dec.sym.c[ku], dec.sym.d[ku],
                   dec.sym.e[ku], dec.sym.f[ku], dec.sym.g[ku]});
    }
    return t;
}

}  // namespace mfglab::lq
