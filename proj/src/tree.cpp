#include "ltt/tree.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <unordered_map>

namespace ltt {

RankedAlphabet::RankedAlphabet(std::vector<Symbol> syms) : symbols_(std::move(syms)) {
    std::set<std::string> seen;
    bool has_nullary = false;
    for (const auto& s : symbols_) {
        if (s.arity < 0) throw std::invalid_argument("alphabet: negative arity for " + s.name);
        if (!seen.insert(s.name).second)
            throw std::invalid_argument("alphabet: duplicate symbol " + s.name);
        if (s.arity == 0) has_nullary = true;
    }
    if (symbols_.empty()) throw std::invalid_argument("alphabet: empty");
    if (!has_nullary) throw std::invalid_argument("alphabet: no nullary symbol, no finite tree exists");
}

std::optional<int> RankedAlphabet::find(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (symbols_[i].name == name) return i;
    return std::nullopt;
}

int RankedAlphabet::max_arity() const {
    int m = 0;
    for (const auto& s : symbols_) m = std::max(m, s.arity);
    return m;
}

bool RankedAlphabet::operator==(const RankedAlphabet& other) const {
    if (size() != other.size()) return false;
    for (int i = 0; i < size(); ++i)
        if (symbols_[i].name != other.symbols_[i].name || symbols_[i].arity != other.symbols_[i].arity)
            return false;
    return true;
}

Tree make_node(int label, std::vector<Tree> children) {
    auto n = std::make_shared<TreeNode>();
    n->label = label;
    n->children = std::move(children);
    return n;
}

std::string path_to_string(const NodePath& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += '/';
        s += std::to_string(p[i]);
    }
    return s;
}

NodePath path_from_string(const std::string& s) {
    NodePath p;
    if (s.empty()) return p;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find('/', pos);
        if (next == std::string::npos) next = s.size();
        if (next == pos) throw ParseError("empty path component", pos);
        p.push_back(std::stoi(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return p;
}

bool path_is_prefix(const NodePath& a, const NodePath& b) {
    if (a.size() > b.size()) return false;
    return std::equal(a.begin(), a.end(), b.begin());
}

bool paths_unrelated(const NodePath& a, const NodePath& b) {
    return !path_is_prefix(a, b) && !path_is_prefix(b, a);
}

namespace {

std::uint64_t tree_size_memo(const Tree& t, std::unordered_map<const TreeNode*, std::uint64_t>& memo) {
    auto it = memo.find(t.get());
    if (it != memo.end()) return it->second;
    std::uint64_t n = 1;
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    for (const auto& c : t->children) {
        std::uint64_t cs = tree_size_memo(c, memo);
        n = (n > kMax - cs) ? kMax : n + cs;
    }
    memo[t.get()] = n;
    return n;
}

int depth_memo(const Tree& t, std::unordered_map<const TreeNode*, int>& memo) {
    auto it = memo.find(t.get());
    if (it != memo.end()) return it->second;
    int d = 0;
    for (const auto& c : t->children) d = std::max(d, 1 + depth_memo(c, memo));
    memo[t.get()] = d;
    return d;
}

struct PtrPairHash {
    std::size_t operator()(const std::pair<const TreeNode*, const TreeNode*>& p) const {
        return std::hash<const TreeNode*>()(p.first) * 1000003u ^ std::hash<const TreeNode*>()(p.second);
    }
};

bool equal_memo(const Tree& a, const Tree& b,
                std::unordered_map<std::pair<const TreeNode*, const TreeNode*>, bool, PtrPairHash>& memo) {
    if (a.get() == b.get()) return true;
    if (a->label != b->label || a->children.size() != b->children.size()) return false;
    auto key = std::make_pair(a.get(), b.get());
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool eq = true;
    for (std::size_t i = 0; i < a->children.size() && eq; ++i)
        eq = equal_memo(a->children[i], b->children[i], memo);
    memo[key] = eq;
    return eq;
}

std::size_t hash_memo(const Tree& t, std::unordered_map<const TreeNode*, std::size_t>& memo) {
    auto it = memo.find(t.get());
    if (it != memo.end()) return it->second;
    std::size_t h = std::hash<int>()(t->label) + 0x9e3779b97f4a7c15ull;
    for (const auto& c : t->children) h = h * 1099511628211ull ^ hash_memo(c, memo);
    memo[t.get()] = h;
    return h;
}

int compare_memo(const Tree& a, const Tree& b,
                 std::unordered_map<std::pair<const TreeNode*, const TreeNode*>, int, PtrPairHash>& memo) {
    if (a.get() == b.get()) return 0;
    if (a->label != b->label) return a->label < b->label ? -1 : 1;
    auto key = std::make_pair(a.get(), b.get());
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int r = 0;
    std::size_t n = std::min(a->children.size(), b->children.size());
    for (std::size_t i = 0; i < n && r == 0; ++i) r = compare_memo(a->children[i], b->children[i], memo);
    if (r == 0 && a->children.size() != b->children.size())
        r = a->children.size() < b->children.size() ? -1 : 1;
    memo[key] = r;
    return r;
}

}  // namespace

std::uint64_t tree_size(const Tree& t) {
    std::unordered_map<const TreeNode*, std::uint64_t> memo;
    return tree_size_memo(t, memo);
}

int tree_depth(const Tree& t) {
    std::unordered_map<const TreeNode*, int> memo;
    return depth_memo(t, memo);
}

bool tree_equal(const Tree& a, const Tree& b) {
    std::unordered_map<std::pair<const TreeNode*, const TreeNode*>, bool, PtrPairHash> memo;
    return equal_memo(a, b, memo);
}

std::size_t tree_hash(const Tree& t) {
    std::unordered_map<const TreeNode*, std::size_t> memo;
    return hash_memo(t, memo);
}

int tree_compare(const Tree& a, const Tree& b) {
    std::unordered_map<std::pair<const TreeNode*, const TreeNode*>, int, PtrPairHash> memo;
    return compare_memo(a, b, memo);
}

const Tree& subtree_at(const Tree& t, const NodePath& path) {
    const Tree* cur = &t;
    for (std::size_t i = 0; i < path.size(); ++i) {
        int step = path[i];
        if (step < 0 || step >= static_cast<int>((*cur)->children.size()))
            throw std::out_of_range("invalid path step " + std::to_string(step) + " at depth " +
                                    std::to_string(i));
        cur = &(*cur)->children[step];
    }
    return *cur;
}

Tree replace_at(const Tree& t, const NodePath& path, const Tree& replacement) {
    if (path.empty()) return replacement;
    int step = path[0];
    if (step < 0 || step >= static_cast<int>(t->children.size()))
        throw std::out_of_range("invalid path step " + std::to_string(step));
    std::vector<Tree> children = t->children;
    children[step] = replace_at(children[step], NodePath(path.begin() + 1, path.end()), replacement);
    return make_node(t->label, std::move(children));
}

Tree make_port() { return make_node(kPortLabel); }

namespace {
bool find_port_rec(const Tree& t, NodePath& path, std::optional<NodePath>& found) {
    if (t->label == kPortLabel) {
        if (found) return false;  // second port
        found = path;
        return true;
    }
    for (std::size_t i = 0; i < t->children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        if (!find_port_rec(t->children[i], path, found)) return false;
        path.pop_back();
    }
    return true;
}
}  // namespace

std::optional<NodePath> find_port(const Tree& t) {
    NodePath path;
    std::optional<NodePath> found;
    if (!find_port_rec(t, path, found)) throw std::invalid_argument("tree has more than one port");
    return found;
}

bool is_context(const Tree& t) {
    NodePath path;
    std::optional<NodePath> found;
    if (!find_port_rec(t, path, found)) return false;
    return found.has_value();
}

Tree graft(const Tree& c, const Tree& u) {
    auto port = find_port(c);
    if (!port) throw std::invalid_argument("graft: left operand has no port");
    return replace_at(c, *port, u);
}

Tree context_between(const Tree& t, const NodePath& x, const NodePath& y) {
    if (!path_is_prefix(x, y))
        throw std::invalid_argument("context_between: y is not a descendant of x");
    const Tree& root = subtree_at(t, x);
    NodePath rel(y.begin() + x.size(), y.end());
    return replace_at(root, rel, make_port());
}

std::string render_tree(const Tree& t, const RankedAlphabet& alphabet) {
    std::string out;
    // explicit stack; witness trees can be deep
    struct Frame {
        const TreeNode* node;
        std::size_t next_child;
    };
    std::vector<Frame> stack{{t.get(), 0}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_child == 0) {
            if (f.node->label == kPortLabel)
                out += '_';
            else if (is_hole_label(f.node->label))
                out += '_' + std::to_string(hole_index(f.node->label) + 1);
            else
                out += alphabet.name(f.node->label);
            if (!f.node->children.empty()) out += '(';
        }
        if (f.next_child < f.node->children.size()) {
            if (f.next_child > 0) out += ',';
            const TreeNode* child = f.node->children[f.next_child].get();
            ++f.next_child;
            stack.push_back({child, 0});
        } else {
            if (!f.node->children.empty()) out += ')';
            stack.pop_back();
        }
    }
    return out;
}

namespace {

struct Parser {
    const std::string& text;
    const RankedAlphabet& alphabet;
    bool allow_port;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    Tree parse() {
        skip_ws();
        Tree t = parse_term();
        skip_ws();
        if (pos != text.size()) throw ParseError("trailing input", pos);
        return t;
    }

    Tree parse_term() {
        skip_ws();
        if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
        std::size_t start = pos;
        if (!std::isalpha(static_cast<unsigned char>(text[pos])) && text[pos] != '_')
            throw ParseError("expected symbol", pos);
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (allow_port && !alphabet.find(name)) {
            if (name == "_") return make_port();
            if (name.size() > 1 && name[0] == '_' &&
                name.find_first_not_of("0123456789", 1) == std::string::npos) {
                int idx = std::stoi(name.substr(1));
                if (idx < 1) throw ParseError("hole index must be >= 1", start);
                return make_node(hole_label(idx - 1));
            }
        }
        auto id = alphabet.find(name);
        if (!id) throw ParseError("unknown symbol '" + name + "'", start);
        int ar = alphabet.arity(*id);
        std::vector<Tree> children;
        skip_ws();
        if (pos < text.size() && text[pos] == '(') {
            ++pos;
            while (true) {
                children.push_back(parse_term());
                skip_ws();
                if (pos >= text.size()) throw ParseError("missing ')'", pos);
                if (text[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (text[pos] == ')') {
                    ++pos;
                    break;
                }
                throw ParseError("expected ',' or ')'", pos);
            }
        }
        if (static_cast<int>(children.size()) != ar)
            throw ParseError("arity mismatch for '" + name + "': expected " + std::to_string(ar) +
                                 ", got " + std::to_string(children.size()),
                             start);
        return make_node(*id, std::move(children));
    }
};

}  // namespace

Tree parse_tree(const std::string& text, const RankedAlphabet& alphabet, bool allow_port) {
    Parser p{text, alphabet, allow_port};
    return p.parse();
}

}  // namespace ltt
