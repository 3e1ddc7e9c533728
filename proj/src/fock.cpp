#include "spinstab/fock.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <tuple>

#include "spinstab/error.hpp"

namespace spinstab {

namespace {

std::uint64_t bit(int x) { return std::uint64_t(1) << x; }
std::uint64_t below(int x) { return bit(x) - 1; }
std::uint64_t full_mask(int n) { return n >= 64 ? ~std::uint64_t(0) : bit(n) - 1; }

// all n-bit masks with k bits set, ascending
std::vector<std::uint64_t> combinations(int n, int k) {
    std::vector<std::uint64_t> out;
    if (k < 0 || k > n) return out;
    if (k == 0) return {0};
    std::uint64_t m = bit(k) - 1;
    const std::uint64_t limit = bit(n);
    while (m < limit) {
        out.push_back(m);
        std::uint64_t c = m & -m, r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    return out;
}

}  // namespace

std::uint64_t BasisState::mask(Species sp, Spin s) const {
    if (sp == Species::c) return s == Spin::up ? up : down;
    return s == Spin::up ? f_up : f_down;
}

std::uint64_t& BasisState::mask(Species sp, Spin s) {
    if (sp == Species::c) return s == Spin::up ? up : down;
    return s == Spin::up ? f_up : f_down;
}

int SpinOrbitalOrder::index(const Mode& m) const {
    int local = int(m.spin) + (with_f ? 2 * int(m.species) : 0);
    return m.site * (with_f ? 4 : 2) + local;
}

int SpinOrbitalOrder::preceding(const BasisState& s, const Mode& m) const {
    const std::uint64_t lo = below(m.site);
    int count = std::popcount(s.up & lo) + std::popcount(s.down & lo);
    if (with_f) count += std::popcount(s.f_up & lo) + std::popcount(s.f_down & lo);
    const std::uint64_t b = bit(m.site);
    // orbitals at the same site that come earlier
    if (m.species == Species::c) {
        if (m.spin == Spin::down) count += (s.up & b) != 0;
    } else {
        count += ((s.up & b) != 0) + ((s.down & b) != 0);
        if (m.spin == Spin::down) count += (s.f_up & b) != 0;
    }
    return count;
}

std::string subspace_name(Subspace s) {
    switch (s) {
        case Subspace::Full: return "full";
        case Subspace::SingleOccupancy: return "single_occupancy";
        case Subspace::OneHoleNoDouble: return "one_hole_no_double";
        case Subspace::Kondo: return "kondo";
    }
    return "?";
}

SectorBasis::SectorBasis(int sites, SubspaceKind kind, std::optional<int> n, std::optional<int> two_m,
                         std::vector<BasisState> electronic)
    : sites_(sites), kind_(kind), n_(n), two_m_(two_m), electronic_(std::move(electronic)) {
    std::sort(electronic_.begin(), electronic_.end());
    if (std::adjacent_find(electronic_.begin(), electronic_.end()) != electronic_.end())
        throw std::invalid_argument("duplicate basis state");
    if (kind_.phonon_cutoff) {
        const int nmax = *kind_.phonon_cutoff;
        if (nmax < 1) throw std::invalid_argument("phonon cutoff must be at least 1");
        radix_.assign(sites_, 1);
        for (int x = sites_ - 2; x >= 0; --x) radix_[x] = radix_[x + 1] * std::uint64_t(nmax + 1);
        phonon_dim_ = sites_ > 0 ? radix_[0] * std::uint64_t(nmax + 1) : 1;
    }
}

BasisState SectorBasis::state(std::size_t i) const {
    BasisState s = electronic_.at(i / phonon_dim_);
    s.phonon = i % phonon_dim_;
    return s;
}

std::optional<std::size_t> SectorBasis::index_of(const BasisState& s) const {
    if (s.phonon >= phonon_dim_) return std::nullopt;
    BasisState e = s;
    e.phonon = 0;
    auto it = std::lower_bound(electronic_.begin(), electronic_.end(), e);
    if (it == electronic_.end() || *it != e) return std::nullopt;
    return std::size_t(it - electronic_.begin()) * phonon_dim_ + s.phonon;
}

int SectorBasis::phonon_occ(const BasisState& s, int site) const {
    if (!has_phonons()) return 0;
    return int((s.phonon / radix_.at(site)) % std::uint64_t(phonon_cutoff() + 1));
}

std::optional<BasisState> SectorBasis::with_phonon(const BasisState& s, int site, int occ) const {
    if (!has_phonons() || occ < 0 || occ > phonon_cutoff()) return std::nullopt;
    BasisState t = s;
    const int cur = phonon_occ(s, site);
    t.phonon = s.phonon + std::uint64_t(occ) * radix_[site] - std::uint64_t(cur) * radix_[site];
    return t;
}

SectorBasis enumerate_sector(const Graph& g, SubspaceKind kind, std::optional<int> n, std::optional<int> two_m) {
    return enumerate_sector(g.vertex_count(), kind, n, two_m);
}

SectorBasis enumerate_sector(int L, SubspaceKind kind, std::optional<int> n, std::optional<int> two_m) {
    if (L < 1) throw std::invalid_argument("need at least one site");
    const std::uint64_t all = full_mask(L);
    std::vector<BasisState> states;
    auto m_ok = [&](int tm) { return !two_m || *two_m == tm; };
    auto sector_desc = [&] {
        return subspace_name(kind.kind) + " N=" + (n ? std::to_string(*n) : "*") +
               " 2M=" + (two_m ? std::to_string(*two_m) : "*");
    };

    switch (kind.kind) {
        case Subspace::Full: {
            if (L > 31) throw std::invalid_argument("too many sites for a full basis");
            for (int nu = 0; nu <= L; ++nu)
                for (int nd = 0; nd <= L; ++nd) {
                    if (n && nu + nd != *n) continue;
                    if (!m_ok(nu - nd)) continue;
                    auto ups = combinations(L, nu), dns = combinations(L, nd);
                    for (auto u : ups)
                        for (auto d : dns) states.push_back({u, d, 0, 0, 0});
                }
            break;
        }
        case Subspace::SingleOccupancy: {
            if (n && *n != L) throw ValidationError("empty sector: " + sector_desc());
            for (int nu = 0; nu <= L; ++nu) {
                if (!m_ok(2 * nu - L)) continue;
                for (auto u : combinations(L, nu)) states.push_back({u, all & ~u, 0, 0, 0});
            }
            break;
        }
        case Subspace::OneHoleNoDouble: {
            if (n && *n != L - 1) throw ValidationError("empty sector: " + sector_desc());
            const int e = L - 1;
            for (int h = 0; h < L; ++h) {
                const std::uint64_t rest = all & ~bit(h);
                for (int nu = 0; nu <= e; ++nu) {
                    if (!m_ok(2 * nu - e)) continue;
                    // choose nu of the e remaining sites
                    for (auto c : combinations(e, nu)) {
                        std::uint64_t u = 0;
                        int k = 0;
                        for (int x = 0; x < L; ++x) {
                            if (x == h) continue;
                            if (c & bit(k)) u |= bit(x);
                            ++k;
                        }
                        states.push_back({u, rest & ~u, 0, 0, 0});
                    }
                }
            }
            break;
        }
        case Subspace::Kondo: {
            if (n && *n != 2 * L) throw ValidationError("empty sector: " + sector_desc());
            if (L > 15) throw std::invalid_argument("too many sites for a Kondo basis");
            for (std::uint64_t fu = 0; fu <= all; ++fu) {
                const int fm = 2 * std::popcount(fu) - L;
                for (int nu = 0; nu <= L; ++nu) {
                    const int nd = L - nu;
                    if (!m_ok(fm + nu - nd)) continue;
                    for (auto u : combinations(L, nu))
                        for (auto d : combinations(L, nd)) states.push_back({u, d, fu, all & ~fu, 0});
                }
            }
            break;
        }
    }
    if (states.empty()) throw ValidationError("empty sector: " + sector_desc());
    return SectorBasis(L, kind, n, two_m, std::move(states));
}

SectorBasis enumerate_fock(int sites) { return enumerate_sector(sites, {Subspace::Full, {}}, std::nullopt, std::nullopt); }

std::optional<std::pair<BasisState, int>> apply_annihilation(const BasisState& s, const Mode& m,
                                                             const SpinOrbitalOrder& order) {
    if (m.species == Species::f && !order.with_f) throw std::invalid_argument("f orbital in a basis without f");
    const std::uint64_t b = bit(m.site);
    if (!(s.mask(m.species, m.spin) & b)) return std::nullopt;
    int sign = (order.preceding(s, m) & 1) ? -1 : 1;
    BasisState t = s;
    t.mask(m.species, m.spin) &= ~b;
    return std::pair{t, sign};
}

std::optional<std::pair<BasisState, int>> apply_creation(const BasisState& s, const Mode& m,
                                                         const SpinOrbitalOrder& order) {
    if (m.species == Species::f && !order.with_f) throw std::invalid_argument("f orbital in a basis without f");
    const std::uint64_t b = bit(m.site);
    if (s.mask(m.species, m.spin) & b) return std::nullopt;
    int sign = (order.preceding(s, m) & 1) ? -1 : 1;
    BasisState t = s;
    t.mask(m.species, m.spin) |= b;
    return std::pair{t, sign};
}

std::optional<std::pair<BasisState, int>> apply_string(const BasisState& s, const std::vector<FermionOp>& ops,
                                                       const SpinOrbitalOrder& order) {
    BasisState cur = s;
    int sign = 1;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        auto r = it->dagger ? apply_creation(cur, it->mode, order) : apply_annihilation(cur, it->mode, order);
        if (!r) return std::nullopt;
        cur = r->first;
        sign *= r->second;
    }
    return std::pair{cur, sign};
}

int magnetization(const BasisState& s) {
    return std::popcount(s.up) + std::popcount(s.f_up) - std::popcount(s.down) - std::popcount(s.f_down);
}

int particle_count(const BasisState& s) {
    return std::popcount(s.up) + std::popcount(s.down) + std::popcount(s.f_up) + std::popcount(s.f_down);
}

VertexModes VertexModes::plain(int sites) {
    VertexModes vm;
    for (int x = 0; x < sites; ++x) vm.vertex.emplace_back(x, Species::c);
    return vm;
}

VertexModes VertexModes::kondo(int sites) {
    VertexModes vm;
    for (int x = 0; x < sites; ++x) {
        vm.vertex.emplace_back(x, Species::c);
        vm.vertex.emplace_back(x, Species::f);
    }
    return vm;
}

std::pair<BasisState, int> distinguished_state(const VertexModes& vm, std::uint64_t b_mask, std::uint64_t x_mask,
                                               std::uint64_t y_mask, bool with_f) {
    const int V = vm.size();
    const std::uint64_t all = full_mask(V);
    const std::uint64_t ybar = all & ~y_mask;
    auto mode = [&](int v, Spin s) { return Mode{vm.vertex[v].first, s, vm.vertex[v].second}; };
    std::vector<FermionOp> ops;
    for (int v = 0; v < V; ++v)
        if (x_mask & bit(v)) ops.push_back({mode(v, Spin::up), true});
    for (int v = 0; v < V; ++v)
        if (ybar & bit(v)) ops.push_back({mode(v, Spin::down), false});
    for (int v = 0; v < V; ++v) ops.push_back({mode(v, Spin::down), true});
    auto r = apply_string(BasisState{}, ops, SpinOrbitalOrder{with_f});
    if (!r) throw std::logic_error("distinguished vector vanished");
    int sign = r->second;
    if (std::popcount(ybar & b_mask) & 1) sign = -sign;
    if (std::popcount(b_mask & all) & 1) sign = -sign;
    return {r->first, sign};
}

SignedIndex mlm_basis_vector(const SectorBasis& basis, const Bipartition& bip, std::uint64_t x_mask) {
    if (basis.kind().kind != Subspace::SingleOccupancy) throw std::invalid_argument("MLM vectors need a SingleOccupancy basis");
    const int L = basis.sites();
    if (int(bip.side.size()) != L) throw std::invalid_argument("bipartition does not match the basis");
    auto [st, sign] = distinguished_state(VertexModes::plain(L), bip.mask_b(), x_mask, full_mask(L) & ~x_mask, false);
    auto idx = basis.index_of(st);
    if (!idx) throw std::invalid_argument("MLM vector outside the basis sector");
    return {*idx, sign};
}

std::pair<BasisState, int> nt_state(const SpinConfig& sigma) {
    const int L = int(sigma.size());
    const int h = hole_position(sigma);
    std::vector<FermionOp> ops;
    ops.push_back({Mode{h, Spin::up}, false});
    for (int x = 0; x < L; ++x) {
        Spin s = (x == h || sigma[x] > 0) ? Spin::up : Spin::down;
        ops.push_back({Mode{x, s}, true});
    }
    auto r = apply_string(BasisState{}, ops, SpinOrbitalOrder{false});
    if (!r) throw std::logic_error("NT vector vanished");
    return *r;
}

SignedIndex nt_basis_vector(const SectorBasis& basis, const SpinConfig& sigma) {
    if (basis.kind().kind != Subspace::OneHoleNoDouble) throw std::invalid_argument("NT vectors need a OneHoleNoDouble basis");
    auto [st, sign] = nt_state(sigma);
    auto idx = basis.index_of(st);
    if (!idx) throw std::invalid_argument("NT vector outside the basis sector");
    return {*idx, sign};
}

SpinConfig nt_config_of(const BasisState& s, int sites) {
    SpinConfig c(sites, 0);
    for (int x = 0; x < sites; ++x) {
        if (s.up & bit(x)) c[x] = 1;
        if (s.down & bit(x)) c[x] = -1;
    }
    return c;
}

}  // namespace spinstab
