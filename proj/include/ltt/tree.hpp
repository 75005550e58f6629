#ifndef LTT_TREE_HPP
#define LTT_TREE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltt {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

struct Symbol {
    std::string name;
    int arity = 0;
};

// Finite ranked alphabet.  Symbol ids are indices into symbols().
class RankedAlphabet {
public:
    RankedAlphabet() = default;
    explicit RankedAlphabet(std::vector<Symbol> syms);

    int size() const { return static_cast<int>(symbols_.size()); }
    const Symbol& symbol(int id) const { return symbols_.at(id); }
    const std::vector<Symbol>& symbols() const { return symbols_; }
    int arity(int id) const { return symbols_.at(id).arity; }
    const std::string& name(int id) const { return symbols_.at(id).name; }
    std::optional<int> find(const std::string& name) const;
    int max_arity() const;

    bool operator==(const RankedAlphabet& other) const;

private:
    std::vector<Symbol> symbols_;
};

// Node label for the port of a context.  Contexts are trees containing
// exactly one port leaf.
constexpr int kPortLabel = -1;
// Base label for hole markers in multi-hole trees: hole i is kHoleBase - i.
constexpr int kHoleBase = -2;

inline constexpr bool is_hole_label(int label) { return label <= kHoleBase; }
inline constexpr int hole_index(int label) { return kHoleBase - label; }
inline constexpr int hole_label(int index) { return kHoleBase - index; }

struct TreeNode;
using Tree = std::shared_ptr<const TreeNode>;

struct TreeNode {
    int label;
    std::vector<Tree> children;
};

Tree make_node(int label, std::vector<Tree> children = {});

using NodePath = std::vector<int>;

std::string path_to_string(const NodePath& p);
NodePath path_from_string(const std::string& s);
bool path_is_prefix(const NodePath& a, const NodePath& b);   // a ancestor-or-equal of b
bool paths_unrelated(const NodePath& a, const NodePath& b);

// Node count of the unfolded tree; saturates instead of overflowing (nodes
// may be shared).
std::uint64_t tree_size(const Tree& t);
int tree_depth(const Tree& t);
bool tree_equal(const Tree& a, const Tree& b);
std::size_t tree_hash(const Tree& t);

// Structural total order (label, then children lexicographically).
int tree_compare(const Tree& a, const Tree& b);

const Tree& subtree_at(const Tree& t, const NodePath& path);
Tree replace_at(const Tree& t, const NodePath& path, const Tree& replacement);

// Contexts: a context is a Tree with exactly one port leaf.
Tree make_port();
std::optional<NodePath> find_port(const Tree& t);
bool is_context(const Tree& t);

// Port of c replaced by u (tree or context).
Tree graft(const Tree& c, const Tree& u);

// Keeps descendants of x that are not descendants of y; port at y.
// Requires x ancestor-or-equal of y.
Tree context_between(const Tree& t, const NodePath& x, const NodePath& y);

// Term syntax: SYMBOL | SYMBOL '(' tree (',' tree)* ')'; port renders as '_',
// hole markers as '_1', '_2', ...
std::string render_tree(const Tree& t, const RankedAlphabet& alphabet);
Tree parse_tree(const std::string& text, const RankedAlphabet& alphabet, bool allow_port = false);

}  // namespace ltt

#endif
