#include "bsl/dyn_graph.hpp"

#include "bsl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace bsl {

namespace {

double eps_or(double eps) { return eps < 0 ? default_epsilon() : eps; }

std::string word_string(const std::vector<int>& w)
{
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(w[i] + 1);
    }
    return s;
}

} // namespace

// ---------------------------------------------------------------- automaton

ConeAutomaton::ConeAutomaton(const CircleMap& map, double eps)
    : map_(map), eps_(eps_or(eps)), n_(map.n())
{
    for (int s = 0; s < 2; ++s) {
        orbit_[s].assign(n_, std::vector<Scalar>(1));
        where_[s].assign(n_, std::vector<int>(1, -1));
    }
    types_.emplace_back();   // root
    index_[{-1, -1}] = 0;
}

void ConeAutomaton::ensure_age(int age)
{
    const auto& cb = map_.comb();
    while (max_age_ < age) {
        int a = ++max_age_;
        for (int m = 0; m < n_; ++m) {
            Scalar r = a == 1 ? map_.c(m) : map_.eval(orbit_[0][m][a - 1]);
            Scalar l;
            if (a == 1) l = map_.eval_left_limit(m);
            else if (a > cb.k(m)) l = r;
            else l = map_.eval(orbit_[1][m][a - 1]);
            orbit_[0][m].push_back(r);
            orbit_[1][m].push_back(a >= cb.k(m) ? r : l);
            where_[0][m].push_back(-1);
            where_[1][m].push_back(-1);
        }
    }
}

const Scalar& ConeAutomaton::point(int id)
{
    int a = ep_age(id);
    ensure_age(a);
    return orbit_[ep_side(id)][ep_m(id)][a];
}

int ConeAutomaton::point_branch(int id)
{
    int a = ep_age(id), m = ep_m(id), s = ep_side(id);
    ensure_age(a);
    int& w = where_[s][m][a];
    if (w >= 0) return w;
    const Scalar& x = orbit_[s][m][a];
    int j;
    try {
        j = map_.locate(x);
    } catch (const AmbiguousBranch& e) {
        throw AmbiguousGeometry(std::string("orbit point of cutting point ") + std::to_string(m + 1) +
                                " at age " + std::to_string(a) + ": " + e.what());
    }
    const auto& cb = map_.comb();
    for (int b : {j, cb.zeta[j]})
        if (circle_distance(CirclePoint(x), CirclePoint(map_.z(b))).upper_d() <= eps_)
            throw AmbiguousGeometry("orbit point of cutting point " + std::to_string(m + 1) +
                                    " at age " + std::to_string(a) + " meets cutting point " +
                                    std::to_string(b + 1));
    w = j;
    return j;
}

int ConeAutomaton::intern(int eL, int eR)
{
    auto [it, fresh] = index_.try_emplace({eL, eR}, static_cast<int>(types_.size()));
    if (fresh) {
        types_.emplace_back();
        types_.back().eL = eL;
        types_.back().eR = eR;
    }
    return it->second;
}

const ConeAutomaton::Type& ConeAutomaton::type(int t)
{
    if (types_[t].expanded) return types_[t];
    const auto& cb = map_.comb();
    std::vector<int> labels, children;
    std::vector<Scalar> cuts;
    if (t == root_type) {
        int a = 0;
        for (int i = 0; i < n_; ++i, a = cb.zeta[a]) {
            labels.push_back(a);
            children.push_back(intern(endpoint_id(a, 1, 0), endpoint_id(cb.zeta[a], 1, 1)));
        }
    } else {
        const int eL = types_[t].eL, eR = types_[t].eR;
        Scalar a = point(eL);
        Scalar len = circle_diff(point(eR), a);
        int beta = point_branch(eL);
        labels.push_back(beta);
        cuts.push_back(Scalar(0, map_.precision()));
        for (int alpha = cb.zeta[beta], guard = 0;; alpha = cb.zeta[alpha], ++guard) {
            if (guard > n_) throw AmbiguousGeometry("cone image wraps the circle");
            Scalar off = circle_diff(map_.z(alpha), a);
            Cmp c = cmp_certified(off, len, 0.0);
            if (c == Cmp::Less) {
                labels.push_back(alpha);
                cuts.push_back(std::move(off));
            }
            else if (c == Cmp::Greater) break;
            else throw AmbiguousGeometry("cutting point " + std::to_string(alpha + 1) +
                                         " not separated from a cone endpoint");
        }
        if (labels.back() != point_branch(eR))
            throw AmbiguousGeometry("cone endpoints inconsistent with partition");
        cuts.push_back(len);
        const int k = static_cast<int>(labels.size());
        for (int i = 0; i < k; ++i) {
            int l = i == 0 ? endpoint_id(ep_m(eL), ep_age(eL) + 1, 0) : endpoint_id(labels[i], 1, 0);
            int r = i == k - 1 ? endpoint_id(ep_m(eR), ep_age(eR) + 1, 1)
                               : endpoint_id(cb.zeta[labels[i]], 1, 1);
            children.push_back(intern(l, r));
        }
    }
    Type& T = types_[t];
    T.labels = std::move(labels);
    T.children = std::move(children);
    T.cuts = std::move(cuts);
    T.expanded = true;
    return T;
}

// ---------------------------------------------------------------- counting

LevelCounts count_levels(ConeAutomaton& A, int L)
{
    LevelCounts out;
    out.gamma0.push_back(1);
    out.dyn.push_back(1);
    std::map<int, std::uint64_t> cur{{ConeAutomaton::root_type, 1}};
    for (int k = 1; k <= L; ++k) {
        std::map<int, std::uint64_t> next;
        for (auto [t, cnt] : cur) {
            std::vector<int> ch = A.type(t).children;
            for (int c : ch) next[c] += cnt;
        }
        std::uint64_t all = 0, runs = 0;
        for (auto [t, cnt] : next) {
            all += cnt;
            if (!A.merged(A.type(t).eL)) runs += cnt;
        }
        out.gamma0.push_back(all);
        out.dyn.push_back(runs == 0 ? 1 : runs);
        cur = std::move(next);
    }
    return out;
}

bool StructureReport::ok(int two_n) const
{
    for (bool b : sphere_cycle)
        if (!b) return false;
    return bad_valency == 0 && min_valency == two_n && max_valency == two_n && iiv_bad_indegree == 0;
}

namespace {

struct RunAcc {
    int members = 0;
    int sum_children = 0;
    int internal = 0;
    int new_merges = 0;
};

struct LevelScan {
    RunAcc cur, first;
    bool have_first = false;
    bool first_closed = false;
    int first_eL = -1, prev_eR = -1;
    std::uint64_t cylinders = 0, runs = 0;
    bool cycle_ok = true;
};

} // namespace

StructureReport scan_structure(ConeAutomaton& A, int L)
{
    const auto& cb = A.map().comb();
    const int two_n = cb.n();
    StructureReport rep;
    rep.levels = L;
    rep.min_valency = 1 << 30;
    rep.max_valency = 0;
    std::vector<LevelScan> lv(L + 1);

    auto same_boundary = [&](int eR, int eL) {
        return A.ep_m(eR) == A.ep_m(eL) && A.ep_age(eR) == A.ep_age(eL) && A.ep_side(eR) == 1 &&
               A.ep_side(eL) == 0;
    };
    auto finish = [&](int k, const RunAcc& r) {
        int parents = 1 + r.new_merges;
        int children = r.sum_children - r.internal;
        int val = parents + children;
        rep.interior_vertices++;
        rep.min_valency = std::min(rep.min_valency, val);
        rep.max_valency = std::max(rep.max_valency, val);
        rep.max_multiplicity = std::max(rep.max_multiplicity, r.members);
        if (val != two_n) {
            if (rep.bad_valency++ == 0)
                rep.witness = "level " + std::to_string(k) + " vertex with valency " + std::to_string(val);
        }
        if (r.members > 1) {
            if (r.new_merges > 0) {
                rep.iiv_count++;
                if (rep.first_iiv_level < 0 || k < rep.first_iiv_level) rep.first_iiv_level = k;
                if (parents != 2) rep.iiv_bad_indegree++;
            } else {
                rep.iie_count++;
            }
        }
    };
    auto visit = [&](int k, int t) {
        const auto& T = A.type(t);
        LevelScan& s = lv[k];
        int nch = static_cast<int>(T.children.size());
        s.cylinders++;
        if (s.cylinders == 1) {
            s.first_eL = T.eL;
        } else if (!same_boundary(s.prev_eR, T.eL)) {
            s.cycle_ok = false;
        }
        if (s.cylinders > 1 && A.merged(T.eL)) {
            s.cur.internal++;
            if (A.ep_age(T.eL) == cb.k(A.ep_m(T.eL))) s.cur.new_merges++;
        } else if (s.cylinders > 1) {
            if (!s.first_closed) {
                s.first = s.cur;
                s.first_closed = true;
            } else {
                finish(k, s.cur);
            }
            s.runs++;
            s.cur = RunAcc{};
        }
        s.cur.members++;
        s.cur.sum_children += nch;
        s.prev_eR = T.eR;
    };

    // iterative preorder; children pushed right to left
    std::vector<std::pair<int, int>> stack;   // (type, level)
    {
        const auto& R = A.type(ConeAutomaton::root_type);
        for (int i = static_cast<int>(R.children.size()) - 1; i >= 0; --i)
            stack.push_back({R.children[i], 1});
    }
    while (!stack.empty()) {
        auto [t, k] = stack.back();
        stack.pop_back();
        visit(k, t);
        if (k < L) {
            std::vector<int> ch = A.type(t).children;
            for (int i = static_cast<int>(ch.size()) - 1; i >= 0; --i) stack.push_back({ch[i], k + 1});
        }
    }

    rep.gamma0_sizes.push_back(1);
    rep.dyn_sizes.push_back(1);
    rep.sphere_cycle.push_back(true);
    for (int k = 1; k <= L; ++k) {
        LevelScan& s = lv[k];
        bool wrap_merged = A.merged(s.first_eL);
        if (!same_boundary(s.prev_eR, s.first_eL)) s.cycle_ok = false;
        if (!s.first_closed) {
            // a single run around the whole circle
            s.cycle_ok = false;
        } else if (wrap_merged) {
            RunAcc r = s.cur;
            r.members += s.first.members;
            r.sum_children += s.first.sum_children;
            r.internal += s.first.internal + 1;
            r.new_merges += s.first.new_merges +
                            (A.ep_age(s.first_eL) == cb.k(A.ep_m(s.first_eL)) ? 1 : 0);
            finish(k, r);
        } else {
            finish(k, s.first);
            finish(k, s.cur);
            s.runs++;
        }
        rep.gamma0_sizes.push_back(s.cylinders);
        rep.dyn_sizes.push_back(s.runs);
        rep.sphere_cycle.push_back(s.cycle_ok);
    }
    // root
    int root_val = static_cast<int>(A.type(ConeAutomaton::root_type).children.size());
    if (root_val != two_n && rep.bad_valency++ == 0) rep.witness = "root valency " + std::to_string(root_val);
    return rep;
}

// ---------------------------------------------------------------- tree

CylinderTree::CylinderTree(ConeAutomaton& A) : A_(&A)
{
    nodes_.emplace_back();
    inv_pow_.push_back(Scalar(1, A.map().precision()));
}

void CylinderTree::expand(int id)
{
    if (nodes_[id].first_child >= 0) return;
    std::vector<int> labels = A_->type(nodes_[id].type).labels;
    std::vector<int> types = A_->type(nodes_[id].type).children;
    const int first = static_cast<int>(nodes_.size());
    const int level = nodes_[id].level + 1;
    for (size_t i = 0; i < labels.size(); ++i) {
        Node c;
        c.parent = id;
        c.label = labels[i];
        c.level = level;
        c.type = types[i];
        c.sibling_index = static_cast<int>(i);
        nodes_.push_back(c);
    }
    nodes_[id].first_child = first;
    nodes_[id].n_children = static_cast<int>(labels.size());
}

int CylinderTree::child(int id, int i)
{
    expand(id);
    return nodes_[id].first_child + i;
}

int CylinderTree::child_by_label(int id, int label)
{
    expand(id);
    for (int i = 0; i < nodes_[id].n_children; ++i)
        if (nodes_[nodes_[id].first_child + i].label == label) return nodes_[id].first_child + i;
    return -1;
}

int CylinderTree::find(const std::vector<int>& word)
{
    int c = 0;
    for (int a : word) {
        c = child_by_label(c, a);
        if (c < 0) return -1;
    }
    return c;
}

int CylinderTree::left_neighbor(int id)
{
    const Node c = nodes_[id];
    if (c.level == 0) throw Error("Internal", "root has no neighbors");
    if (c.sibling_index > 0) return id - 1;
    int p = c.parent == 0 ? 0 : left_neighbor(c.parent);
    expand(p);
    return nodes_[p].first_child + nodes_[p].n_children - 1;
}

int CylinderTree::right_neighbor(int id)
{
    const Node c = nodes_[id];
    if (c.level == 0) throw Error("Internal", "root has no neighbors");
    if (c.sibling_index + 1 < nodes_[c.parent].n_children) return id + 1;
    int p = c.parent == 0 ? 0 : right_neighbor(c.parent);
    expand(p);
    return nodes_[p].first_child;
}

bool CylinderTree::left_merged(int id) { return A_->merged(A_->type(nodes_[id].type).eL); }
bool CylinderTree::right_merged(int id) { return A_->merged(A_->type(nodes_[id].type).eR); }

std::vector<int> CylinderTree::word(int id) const
{
    std::vector<int> w;
    for (int c = id; c != 0; c = nodes_[c].parent) w.push_back(nodes_[c].label);
    std::reverse(w.begin(), w.end());
    return w;
}

const std::pair<Scalar, Scalar>& CylinderTree::interval(int id)
{
    if (id == 0) throw Error("Internal", "root has no interval");
    auto it = iv_.find(id);
    if (it != iv_.end()) return it->second;
    const Node c = nodes_[id];
    const CircleMap& map = A_->map();
    if (c.level == 1) {
        Scalar lo = map.z(c.label);
        Scalar hi = lo;
        hi += map.length(c.label);
        return iv_.emplace(id, std::make_pair(std::move(lo), std::move(hi))).first->second;
    }
    const auto& piv = interval(c.parent);
    const Node p = nodes_[c.parent];
    while (static_cast<int>(inv_pow_.size()) <= p.level) inv_pow_.push_back(inv_pow_.back() / map.lambda());
    const auto& cuts = A_->type(p.type).cuts;
    const Scalar& s = inv_pow_[p.level];
    const int i = c.sibling_index;
    Scalar lo = piv.first, hi = piv.second;
    if (i != 0) {
        Scalar d = cuts[i];
        d *= s;
        lo += d;
    }
    if (i + 1 != p.n_children) {
        hi = cuts[i + 1];
        hi *= s;
        hi += piv.first;
    }
    return iv_.emplace(id, std::make_pair(std::move(lo), std::move(hi))).first->second;
}

// ---------------------------------------------------------------- graph

const char* to_string(VertexKind k)
{
    switch (k) {
    case VertexKind::Root: return "Root";
    case VertexKind::TypeI: return "TypeI";
    case VertexKind::TypeIIv: return "TypeIIv";
    case VertexKind::TypeIIe: return "TypeIIe";
    }
    return "?";
}

DynGraph::DynGraph(const CircleMap& map, int max_level, double eps)
    : A_(map, eps), T_(A_), max_level_(max_level)
{
    V root;
    root.members = {0};
    verts_.push_back(root);
    by_cyl_[0] = 0;
}

int DynGraph::vertex_of(int cyl)
{
    auto it = by_cyl_.find(cyl);
    if (it != by_cyl_.end()) return it->second;
    const int level = T_.node(cyl).level;
    if (level > max_level_ + 1)
        throw LevelBoundExceeded("level " + std::to_string(level) + " beyond bound " +
                                 std::to_string(max_level_));
    int l = cyl;
    for (int guard = 0; T_.left_merged(l); ++guard) {
        if (guard > 1 << 20) throw Error("Internal", "run does not terminate");
        l = T_.left_neighbor(l);
    }
    std::vector<int> mem{l};
    while (T_.right_merged(mem.back())) {
        int r = T_.right_neighbor(mem.back());
        if (r == l) throw Error("Internal", "run wraps the circle");
        mem.push_back(r);
    }
    int key = mem[0];
    std::vector<int> kw = T_.word(key);
    for (int m : mem) {
        std::vector<int> w = T_.word(m);
        if (w < kw) {
            kw = w;
            key = m;
        }
    }
    V v;
    v.level = level;
    v.members = mem;
    v.key = key;
    if (mem.size() == 1) {
        v.kind = VertexKind::TypeI;
    } else {
        std::set<int> par;
        for (int m : mem) par.insert(T_.node(m).parent);
        // parents differ exactly across boundaries that fold at this level
        bool fresh = false;
        for (size_t i = 1; i < mem.size(); ++i) {
            int eL = A_.type(T_.node(mem[i]).type).eL;
            if (A_.ep_age(eL) == A_.map().comb().k(A_.ep_m(eL))) fresh = true;
        }
        v.kind = fresh ? VertexKind::TypeIIv : VertexKind::TypeIIe;
    }
    int id = static_cast<int>(verts_.size());
    verts_.push_back(std::move(v));
    for (int m : mem) by_cyl_[m] = id;
    return id;
}

int DynGraph::vertex_of_word(const std::vector<int>& word)
{
    int c = T_.find(word);
    return c < 0 ? -1 : vertex_of(c);
}

std::vector<int> DynGraph::key_word(int v) const { return T_.word(verts_[v].key); }

std::string DynGraph::id_string(int v) const
{
    return v == 0 ? std::string("v0") : "v" + word_string(key_word(v));
}

const std::vector<GEdge>& DynGraph::edges(int v)
{
    if (verts_[v].has_edges) return verts_[v].edges;
    if (verts_[v].level >= max_level_)
        throw LevelBoundExceeded("edges of level " + std::to_string(verts_[v].level) +
                                 " vertex need level " + std::to_string(verts_[v].level + 1));
    const auto& cb = A_.map().comb();
    std::vector<GEdge> out;
    std::vector<int> mem = verts_[v].members;
    for (int m : mem) {
        T_.expand(m);
        int first = T_.node(m).first_child, cnt = T_.node(m).n_children;
        for (int i = 0; i < cnt; ++i) {
            int c = first + i;
            GEdge e{T_.node(c).label, vertex_of(c), true};
            if (!out.empty() && out.back().label == e.label && out.back().target == e.target) continue;
            out.push_back(e);
        }
    }
    if (v != 0) {
        for (auto it = mem.rbegin(); it != mem.rend(); ++it) {
            int p = T_.node(*it).parent;
            GEdge e{cb.bar(T_.node(*it).label), vertex_of(p), false};
            bool dup = false;
            for (const auto& f : out)
                if (!f.down && f.label == e.label && f.target == e.target) dup = true;
            if (!dup) out.push_back(e);
        }
    }
    std::vector<int> seen(cb.n(), -1);
    for (const auto& e : out) {
        if (seen[e.label] >= 0 && seen[e.label] != e.target)
            throw Error("FoldConflict", id_string(v) + " has two edges labeled " + std::to_string(e.label + 1));
        seen[e.label] = e.target;
    }
    verts_[v].edges = std::move(out);
    verts_[v].has_edges = true;
    return verts_[v].edges;
}

int DynGraph::follow(int v, int label)
{
    for (const auto& e : edges(v))
        if (e.label == label) return e.target;
    return -1;
}

int DynGraph::parents(int v)
{
    int c = 0;
    for (const auto& e : edges(v))
        if (!e.down) ++c;
    return c;
}

std::pair<Scalar, Scalar> DynGraph::interval(int v)
{
    if (v == 0) throw Error("Internal", "root has no interval");
    const auto& mem = verts_[v].members;
    // members may sit on either side of 0; accumulate lengths from the left end
    if (mem.size() == 1) return T_.interval(mem.front());
    Scalar lo = T_.interval(mem.front()).first;
    Scalar hi = lo;
    for (int m : mem) {
        const auto& [a, b] = T_.interval(m);
        hi += b;
        hi -= a;
    }
    return {std::move(lo), std::move(hi)};
}

bool CompactSet::ok() const
{
    for (const auto& l : loops)
        if (!l.closes) return false;
    return !loops.empty();
}

CompactSet compact_set(DynGraph& G, int v)
{
    const auto& cb = G.map().comb();
    CompactSet cs;
    cs.center = v;
    std::set<int> all{v};
    for (int j = 0; j < cb.n(); ++j) {
        CompactLoop loop;
        loop.j = j;
        const int k = cb.k(j);
        std::vector<int> right{v}, left{v};
        for (int t = 0; t < k; ++t) {
            int r = G.follow(right.back(), cb.delta_pow(t, j));
            int l = G.follow(left.back(), cb.gamma_pow(t, cb.zeta_inv[j]));
            if (r < 0 || l < 0) break;
            right.push_back(r);
            left.push_back(l);
        }
        loop.closes = static_cast<int>(right.size()) == k + 1 && right.back() == left.back();
        loop.path = right;
        for (int t = static_cast<int>(left.size()) - 2; t >= 1; --t) loop.path.push_back(left[t]);
        all.insert(right.begin(), right.end());
        all.insert(left.begin(), left.end());
        cs.loops.push_back(std::move(loop));
    }
    cs.vertices.assign(all.begin(), all.end());
    return cs;
}

// ---------------------------------------------------------------- explicit

std::vector<std::vector<int>> ExplicitGraph::adjacency() const
{
    std::vector<std::vector<int>> adj(vertices.size());
    for (const auto& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    return adj;
}

std::vector<std::uint64_t> ExplicitGraph::sphere_sizes() const
{
    std::vector<std::uint64_t> s(max_level + 1, 0);
    for (const auto& v : vertices) s[v.level]++;
    return s;
}

namespace {

// Fully expands the tree to level L; returns node ids per level in cyclic order.
std::vector<std::vector<int>> expand_levels(CylinderTree& T, int L)
{
    std::vector<std::vector<int>> lv(L + 1);
    lv[0] = {0};
    for (int k = 1; k <= L; ++k)
        for (int p : lv[k - 1]) {
            T.expand(p);
            for (int i = 0; i < T.node(p).n_children; ++i) lv[k].push_back(T.node(p).first_child + i);
        }
    return lv;
}

void check_budget(const CircleMap& map, int L, std::uint64_t budget, bool dyn)
{
    ConeAutomaton A(map);
    LevelCounts lc = count_levels(A, L);
    std::uint64_t total = 0;
    for (auto x : lc.gamma0) total += x;   // the tree is materialized either way
    (void)dyn;
    if (total > budget)
        throw BudgetExceeded(std::to_string(total) + " cylinders up to level " + std::to_string(L) +
                             " exceed the vertex budget " + std::to_string(budget));
}

void fill_interval(GraphVertex& gv, CylinderTree& T, int first, int last, int digits)
{
    gv.lo = CirclePoint(T.interval(first).first).to_string(digits);
    gv.hi = CirclePoint(T.interval(last).second).to_string(digits);
}

} // namespace

ExplicitGraph build_gamma0(const CircleMap& map, int L, const BuildOptions& opt)
{
    if (L < 1) throw ConfigError("level bound must be >= 1");
    check_budget(map, L, opt.vertex_budget, false);
    ConeAutomaton A(map, opt.eps);
    CylinderTree T(A);
    auto lv = expand_levels(T, L);
    ExplicitGraph g;
    g.name = "gamma0";
    g.max_level = L;
    std::vector<int> vid(T.size(), -1);
    const double eps = eps_or(opt.eps);
    for (int k = 0; k <= L; ++k) {
        for (int c : lv[k]) {
            GraphVertex gv;
            gv.level = k;
            gv.kind = k == 0 ? VertexKind::Root : VertexKind::TypeI;
            gv.words.push_back(T.word(c));
            if (opt.with_intervals && k > 0) fill_interval(gv, T, c, c, opt.digits);
            vid[c] = static_cast<int>(g.vertices.size());
            g.vertices.push_back(std::move(gv));
            if (k > 0) g.edges.push_back({vid[T.node(c).parent], vid[c], T.node(c).label, false});
        }
        if (k == 0) continue;
        const auto& cyl = lv[k];
        const int m = static_cast<int>(cyl.size());
        for (int i = 0; i < m; ++i) {
            int a = cyl[i], b = cyl[(i + 1) % m];
            if (a == b) continue;
            bool adjacent;
            if (opt.with_intervals) {
                Scalar gap = circle_distance(CirclePoint(T.interval(a).second), CirclePoint(T.interval(b).first));
                adjacent = gap.upper_d() <= eps;
            } else {
                int eR = A.type(T.node(a).type).eR, eL = A.type(T.node(b).type).eL;
                adjacent = A.ep_m(eR) == A.ep_m(eL) && A.ep_age(eR) == A.ep_age(eL);
            }
            if (adjacent && !(m == 2 && i == 1)) g.edges.push_back({vid[a], vid[b], -1, true});
        }
    }
    return g;
}

ExplicitGraph build_dyngraph(const CircleMap& map, int L, const BuildOptions& opt)
{
    if (L < 1) throw ConfigError("level bound must be >= 1");
    check_budget(map, L, opt.vertex_budget, true);
    ConeAutomaton A(map, opt.eps);
    CylinderTree T(A);
    auto lv = expand_levels(T, L);
    ExplicitGraph g;
    g.name = opt.fold ? "dynamical" : "tree";
    g.max_level = L;
    std::vector<int> run_of(T.size(), -1);
    g.vertices.push_back({0, VertexKind::Root, {{}}, "", ""});
    run_of[0] = 0;
    const auto& cb = map.comb();
    for (int k = 1; k <= L; ++k) {
        const auto& cyl = lv[k];
        const int m = static_cast<int>(cyl.size());
        // start at a boundary that does not fold
        int start = 0;
        if (opt.fold) {
            start = -1;
            for (int i = 0; i < m; ++i)
                if (!T.left_merged(cyl[i])) {
                    start = i;
                    break;
                }
            if (start < 0) throw Error("Internal", "every boundary folds at level " + std::to_string(k));
        }
        std::vector<std::vector<int>> runs;
        for (int s = 0; s < m; ++s) {
            int c = cyl[(start + s) % m];
            if (runs.empty() || !opt.fold || !T.left_merged(c)) runs.emplace_back();
            runs.back().push_back(c);
        }
        // canonical order within a level: lexicographically least member word
        std::vector<std::pair<std::vector<int>, int>> keyed;
        for (int r = 0; r < static_cast<int>(runs.size()); ++r) {
            std::vector<int> best = T.word(runs[r][0]);
            for (int c : runs[r]) best = std::min(best, T.word(c));
            keyed.push_back({best, r});
        }
        std::sort(keyed.begin(), keyed.end());
        for (const auto& [key, r] : keyed) {
            const auto& mem = runs[r];
            GraphVertex gv;
            gv.level = k;
            std::set<int> par;
            bool fresh = false;
            for (size_t i = 0; i < mem.size(); ++i) {
                gv.words.push_back(T.word(mem[i]));
                par.insert(run_of[T.node(mem[i]).parent]);
                if (i > 0) {
                    int eL = A.type(T.node(mem[i]).type).eL;
                    if (A.ep_age(eL) == cb.k(A.ep_m(eL))) fresh = true;
                }
            }
            gv.kind = mem.size() == 1 ? VertexKind::TypeI : fresh ? VertexKind::TypeIIv : VertexKind::TypeIIe;
            if (opt.with_intervals) fill_interval(gv, T, mem.front(), mem.back(), opt.digits);
            int id = static_cast<int>(g.vertices.size());
            for (int c : mem) run_of[c] = id;
            g.vertices.push_back(std::move(gv));
            std::set<std::pair<int, int>> seen;
            for (int c : mem) {
                int p = run_of[T.node(c).parent];
                if (seen.insert({p, T.node(c).label}).second)
                    g.edges.push_back({p, id, T.node(c).label, false});
            }
        }
    }
    return g;
}

bool spheres_are_cycles(const ExplicitGraph& g, std::string* witness)
{
    std::vector<std::vector<int>> sadj(g.vertices.size());
    for (const auto& e : g.edges)
        if (e.sphere) {
            sadj[e.u].push_back(e.v);
            sadj[e.v].push_back(e.u);
        }
    std::vector<std::vector<int>> by_level(g.max_level + 1);
    for (int i = 0; i < static_cast<int>(g.vertices.size()); ++i) by_level[g.vertices[i].level].push_back(i);
    for (int k = 1; k <= g.max_level; ++k) {
        const auto& vs = by_level[k];
        size_t edges = 0;
        for (int v : vs) {
            edges += sadj[v].size();
            if (vs.size() > 2 && sadj[v].size() != 2) {
                if (witness) *witness = "level " + std::to_string(k) + " vertex with sphere degree " +
                                        std::to_string(sadj[v].size());
                return false;
            }
        }
        edges /= 2;
        std::vector<char> seen(g.vertices.size(), 0);
        std::vector<int> q{vs[0]};
        seen[vs[0]] = 1;
        for (size_t h = 0; h < q.size(); ++h)
            for (int w : sadj[q[h]])
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push_back(w);
                }
        if (q.size() != vs.size() || (vs.size() > 2 && edges != vs.size())) {
            if (witness) *witness = "level " + std::to_string(k) + ": " + std::to_string(q.size()) + " of " +
                                    std::to_string(vs.size()) + " reached, " + std::to_string(edges) + " edges";
            return false;
        }
    }
    return true;
}

GrowthReport sphere_growth(const std::vector<std::uint64_t>& sizes)
{
    GrowthReport r;
    r.sizes = sizes;
    for (size_t k = 1; k < sizes.size(); ++k)
        r.ratios.push_back(static_cast<double>(sizes[k]) / static_cast<double>(sizes[k - 1]));
    const size_t t = std::min<size_t>(3, r.ratios.size());
    double lg = 0;
    for (size_t i = r.ratios.size() - t; i < r.ratios.size(); ++i) lg += std::log(r.ratios[i]);
    r.estimate = t ? std::exp(lg / static_cast<double>(t)) : 0;
    return r;
}

std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int src)
{
    std::vector<int> d(adj.size(), -1);
    std::vector<int> q{src};
    d[src] = 0;
    for (size_t h = 0; h < q.size(); ++h)
        for (int w : adj[q[h]])
            if (d[w] < 0) {
                d[w] = d[q[h]] + 1;
                q.push_back(w);
            }
    return d;
}

double gromov_delta(const std::vector<std::vector<int>>& adj, const std::vector<int>& points, int threshold,
                    std::uint64_t seed)
{
    std::vector<int> pts = points;
    if (static_cast<int>(pts.size()) > threshold) {
        std::mt19937_64 rng(seed);
        std::shuffle(pts.begin(), pts.end(), rng);
        pts.resize(threshold);
        std::sort(pts.begin(), pts.end());
    }
    const int s = static_cast<int>(pts.size());
    std::vector<std::vector<int>> D(s);
    for (int i = 0; i < s; ++i) {
        auto d = bfs_distances(adj, pts[i]);
        D[i].resize(s);
        for (int j = 0; j < s; ++j) D[i][j] = d[pts[j]];
    }
    int best = 0;
    for (int a = 0; a < s; ++a)
        for (int b = a + 1; b < s; ++b)
            for (int c = b + 1; c < s; ++c)
                for (int e = c + 1; e < s; ++e) {
                    int x = D[a][b] + D[c][e], y = D[a][c] + D[b][e], z = D[a][e] + D[b][c];
                    int hi = std::max({x, y, z});
                    int mid = x + y + z - hi - std::min({x, y, z});
                    best = std::max(best, hi - mid);
                }
    return best / 2.0;
}

double hyperbolicity_delta(const ExplicitGraph& g, int R, int threshold, std::uint64_t seed)
{
    if (R > g.max_level) throw LevelBoundExceeded("radius beyond built levels");
    std::vector<int> ball;
    for (int i = 0; i < static_cast<int>(g.vertices.size()); ++i)
        if (g.vertices[i].level <= R) ball.push_back(i);
    return gromov_delta(g.adjacency(), ball, threshold, seed);
}

// ---------------------------------------------------------------- exports

namespace {

std::string vid_string(const ExplicitGraph& g, int i)
{
    const auto& v = g.vertices[i];
    if (v.level == 0) return "v0";
    std::vector<int> best = v.words[0];
    for (const auto& w : v.words) best = std::min(best, w);
    return "v" + word_string(best);
}

std::string json_escape(const std::string& s)
{
    std::string o;
    for (char c : s) {
        if (c == '"' || c == '\\') o += '\\';
        o += c;
    }
    return o;
}

} // namespace

void write_dot(const ExplicitGraph& g, std::ostream& os)
{
    os << "graph " << g.name << " {\n";
    for (int i = 0; i < static_cast<int>(g.vertices.size()); ++i) {
        const auto& v = g.vertices[i];
        os << "  \"" << vid_string(g, i) << "\" [level=" << v.level << ", kind=" << to_string(v.kind);
        if (!v.lo.empty()) os << ", lo=\"" << v.lo << "\", hi=\"" << v.hi << "\"";
        os << "];\n";
    }
    for (const auto& e : g.edges) {
        os << "  \"" << vid_string(g, e.u) << "\" -- \"" << vid_string(g, e.v) << "\"";
        if (e.sphere) os << " [style=dashed]";
        else os << " [label=\"Psi_" << e.label + 1 << "\"]";
        os << ";\n";
    }
    os << "}\n";
}

void write_graphml(const ExplicitGraph& g, std::ostream& os)
{
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
       << "  <key id=\"level\" for=\"node\" attr.name=\"level\" attr.type=\"int\"/>\n"
       << "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
       << "  <key id=\"lo\" for=\"node\" attr.name=\"lo\" attr.type=\"string\"/>\n"
       << "  <key id=\"hi\" for=\"node\" attr.name=\"hi\" attr.type=\"string\"/>\n"
       << "  <key id=\"label\" for=\"edge\" attr.name=\"label\" attr.type=\"int\"/>\n"
       << "  <key id=\"sphere\" for=\"edge\" attr.name=\"sphere\" attr.type=\"boolean\"/>\n"
       << "  <graph id=\"" << g.name << "\" edgedefault=\"undirected\">\n";
    for (int i = 0; i < static_cast<int>(g.vertices.size()); ++i) {
        const auto& v = g.vertices[i];
        os << "    <node id=\"" << vid_string(g, i) << "\"><data key=\"level\">" << v.level
           << "</data><data key=\"kind\">" << to_string(v.kind) << "</data>";
        if (!v.lo.empty()) os << "<data key=\"lo\">" << v.lo << "</data><data key=\"hi\">" << v.hi << "</data>";
        os << "</node>\n";
    }
    for (const auto& e : g.edges) {
        os << "    <edge source=\"" << vid_string(g, e.u) << "\" target=\"" << vid_string(g, e.v) << "\">";
        if (e.sphere) os << "<data key=\"sphere\">true</data>";
        else os << "<data key=\"label\">" << e.label + 1 << "</data>";
        os << "</edge>\n";
    }
    os << "  </graph>\n</graphml>\n";
}

void write_jsonl(const ExplicitGraph& g, std::ostream& os)
{
    for (int i = 0; i < static_cast<int>(g.vertices.size()); ++i) {
        const auto& v = g.vertices[i];
        os << "{\"type\":\"vertex\",\"id\":\"" << vid_string(g, i) << "\",\"level\":" << v.level
           << ",\"kind\":\"" << to_string(v.kind) << "\",\"words\":[";
        for (size_t w = 0; w < v.words.size(); ++w)
            os << (w ? "," : "") << "\"" << json_escape(word_string(v.words[w])) << "\"";
        os << "]";
        if (!v.lo.empty()) os << ",\"lo\":\"" << v.lo << "\",\"hi\":\"" << v.hi << "\"";
        os << "}\n";
    }
    for (const auto& e : g.edges) {
        os << "{\"type\":\"edge\",\"source\":\"" << vid_string(g, e.u) << "\",\"target\":\""
           << vid_string(g, e.v) << "\"";
        if (e.sphere) os << ",\"sphere\":true";
        else os << ",\"label\":" << e.label + 1;
        os << "}\n";
    }
}

} // namespace bsl
