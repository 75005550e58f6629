#include "ltt/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltt/dfta.hpp"
#include "ltt/guarded.hpp"
#include "ltt/ktype.hpp"
#include "ltt/oracles.hpp"
#include "ltt/sample_languages.hpp"
#include "ltt/tameness.hpp"
#include "ltt/testability.hpp"
#include "ltt/unranked.hpp"

namespace ltt {

namespace {

using ojson = nlohmann::ordered_json;

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --tree accepts a file name, '-', or a literal term
std::string tree_text(const std::string& arg) {
    if (arg == "-") return slurp("-");
    std::ifstream in(arg);
    if (in) {
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return arg;
}

bool looks_counting(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    return j.contains("m");
}

Budget budget_from(std::uint64_t n) {
    Budget b;
    b.max_steps = n;
    b.max_typed_states = std::min<std::uint64_t>(b.max_typed_states, n);
    b.max_behaviors = std::min<std::uint64_t>(b.max_behaviors, n);
    b.max_product_states = std::min<std::uint64_t>(b.max_product_states, n);
    return b;
}

struct Doc {
    ojson j;
    bool as_text;
    bool timing;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Doc(const std::string& command, bool text, bool with_timing) : as_text(text), timing(with_timing) {
        j["command"] = command;
        j["status"] = "";
        j["parameters"] = ojson::object();
        j["witnesses"] = ojson::array();
        j["bounds"] = ojson::object();
    }

    void param(const std::string& key, const ojson& v) { j["parameters"][key] = v; }
    void bound(const std::string& key, const ojson& v) { j["bounds"][key] = v; }
    void witness(const std::string& w) { j["witnesses"].push_back(w); }

    void emit(std::ostream& out) {
        if (timing)
            j["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
        if (!as_text) {
            out << j.dump(2) << "\n";
            return;
        }
        std::function<void(const std::string&, const ojson&, int)> line =
            [&](const std::string& key, const ojson& v, int indent) {
                out << std::string(indent, ' ') << key << ": ";
                if (v.is_object()) {
                    out << "\n";
                    for (auto it = v.begin(); it != v.end(); ++it) line(it.key(), it.value(), indent + 2);
                    return;
                }
                if (v.is_array()) {
                    out << "\n";
                    for (const auto& e : v)
                        out << std::string(indent + 2, ' ') << (e.is_string() ? e.get<std::string>() : e.dump())
                            << "\n";
                    return;
                }
                out << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
            };
        for (auto it = j.begin(); it != j.end(); ++it) line(it.key(), it.value(), 0);
    }
};

int status_exit(Status s) { return s == Status::Unknown ? 2 : 0; }
int status_exit(LtStatus s) { return s == LtStatus::Unknown ? 2 : 0; }

void put_explored(Doc& doc, const std::map<std::string, std::uint64_t>& explored) {
    for (const auto& [k, v] : explored) doc.bound(k, v);
}

void put_op_witness(Doc& doc, const OpInstance& w, const RankedAlphabet& alphabet) {
    ojson entry;
    entry["op"] = to_string(w.op);
    entry["k"] = w.k;
    entry["tree"] = render_tree(w.tree, alphabet);
    ojson nodes = ojson::array();
    for (const auto& p : w.nodes) nodes.push_back(path_to_string(p));
    entry["nodes"] = nodes;
    doc.j["witnesses"].push_back(entry);
}

void put_uop_witness(Doc& doc, const UOpInstance& w, const UnrankedAlphabet& alphabet) {
    ojson entry;
    entry["op"] = to_string(w.op);
    entry["k"] = w.k;
    entry["l"] = w.l;
    entry["tree"] = render_unranked(w.tree, alphabet);
    ojson nodes = ojson::array();
    for (const auto& p : w.nodes) nodes.push_back(path_to_string(p));
    entry["nodes"] = nodes;
    doc.j["witnesses"].push_back(entry);
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"decision procedures for locally testable regular tree languages"};
    app.require_subcommand(1);

    std::string automaton_path, tree_arg, word_dfa_path, alphabet_spec = "a:2,b:0";
    std::string op_name = "hswap", path_arg, nodes_arg, format = "json", oracle_mode;
    int k = 0, l = -1, kappa = 0, lambda = 1, max_kappa = 3, max_nodes = 7;
    int n_states = 2, m_threshold = 1;
    std::uint64_t budget_steps = Budget{}.max_steps, seed = 1;
    bool complete_with_sink = false, no_guard = false, unranked_random = false, timing = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
        cmd->add_flag("--timing", timing, "include wall-clock milliseconds in the document");
    };
    auto add_automaton = [&](CLI::App* cmd) {
        cmd->add_option("--automaton", automaton_path)->required();
        cmd->add_flag("--complete-with-sink", complete_with_sink);
    };

    CLI::App* validate = app.add_subcommand("validate", "check an automaton file");
    add_common(validate);
    add_automaton(validate);

    CLI::App* minimize_cmd = app.add_subcommand("minimize", "emit the minimized automaton");
    add_automaton(minimize_cmd);

    CLI::App* run_cmd = app.add_subcommand("run", "evaluate a tree");
    add_common(run_cmd);
    add_automaton(run_cmd);
    run_cmd->add_option("--tree", tree_arg)->required();

    CLI::App* ktype_cmd = app.add_subcommand("ktype", "k-type of a node");
    add_common(ktype_cmd);
    add_automaton(ktype_cmd);
    ktype_cmd->add_option("--tree", tree_arg)->required();
    ktype_cmd->add_option("--k", k)->required();
    ktype_cmd->add_option("--path", path_arg);

    CLI::App* apply_cmd = app.add_subcommand("apply-op", "apply a guarded operation");
    add_common(apply_cmd);
    add_automaton(apply_cmd);
    apply_cmd->add_option("--tree", tree_arg)->required();
    apply_cmd->add_option("--op", op_name)->required();
    apply_cmd->add_option("--nodes", nodes_arg, "semicolon-separated node paths")->required();
    apply_cmd->add_option("--k", k)->required();
    apply_cmd->add_option("--l", l);
    apply_cmd->add_flag("--no-guard", no_guard);

    CLI::App* tame_cmd = app.add_subcommand("tame", "tameness / k-tameness");
    add_common(tame_cmd);
    add_automaton(tame_cmd);
    tame_cmd->add_option("--k", k, "check k-tameness instead of tameness at k0");
    tame_cmd->add_option("--l", l, "counting automata: the guard threshold l");
    tame_cmd->add_option("--budget", budget_steps);
    bool k_given = false;
    tame_cmd->callback([&]() { k_given = tame_cmd->count("--k") > 0; });

    CLI::App* testable_cmd = app.add_subcommand("testable", "kappa-testability");
    add_common(testable_cmd);
    add_automaton(testable_cmd);
    testable_cmd->add_option("--kappa", kappa)->required();
    testable_cmd->add_option("--lambda", lambda);
    testable_cmd->add_option("--budget", budget_steps);

    CLI::App* lt_cmd = app.add_subcommand("decide-lt", "is the language locally testable");
    add_common(lt_cmd);
    add_automaton(lt_cmd);
    lt_cmd->add_option("--max-kappa", max_kappa);
    lt_cmd->add_option("--budget", budget_steps);

    CLI::App* ilt_cmd = app.add_subcommand("decide-ilt", "idempotent LT for unranked trees");
    add_common(ilt_cmd);
    add_automaton(ilt_cmd);
    ilt_cmd->add_option("--budget", budget_steps);

    CLI::App* alt_cmd = app.add_subcommand("decide-alt", "aperiodic LT for unranked trees");
    add_common(alt_cmd);
    add_automaton(alt_cmd);
    alt_cmd->add_option("--max-kappa", max_kappa);
    alt_cmd->add_option("--lambda", lambda, "maximum lambda for the scan");
    alt_cmd->add_option("--budget", budget_steps);

    CLI::App* oracle_cmd = app.add_subcommand("oracle", "brute-force oracles");
    add_common(oracle_cmd);
    oracle_cmd->add_option("mode", oracle_mode)->required()->check(CLI::IsMember({"closure", "testable", "semigroup"}));
    oracle_cmd->add_option("--automaton", automaton_path);
    oracle_cmd->add_flag("--complete-with-sink", complete_with_sink);
    oracle_cmd->add_option("--op", op_name);
    oracle_cmd->add_option("--k", k);
    oracle_cmd->add_option("--kappa", kappa);
    oracle_cmd->add_option("--max-nodes", max_nodes);
    oracle_cmd->add_option("--word-dfa", word_dfa_path);

    CLI::App* random_cmd = app.add_subcommand("random", "emit a random automaton");
    random_cmd->add_option("--alphabet", alphabet_spec, "name:arity,... (ranked) or names (unranked)");
    random_cmd->add_option("--states", n_states);
    random_cmd->add_option("--seed", seed);
    random_cmd->add_option("--m", m_threshold);
    random_cmd->add_flag("--unranked", unranked_random);

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        Budget budget = budget_from(budget_steps);
        bool as_text = format == "text";

        if (validate->parsed()) {
            Doc doc("validate", as_text, timing);
            std::string text = slurp(automaton_path);
            doc.param("automaton", automaton_path);
            if (looks_counting(text)) {
                CountingDfta a = load_counting_dfta(text, complete_with_sink);
                doc.j["status"] = "ok";
                doc.bound("kind", "counting");
                doc.bound("states", a.n_states());
                doc.bound("m", a.threshold());
                doc.bound("minimal_states", minimize_counting(a).n_states());
            } else {
                Dfta a = load_dfta(text, complete_with_sink);
                doc.j["status"] = "ok";
                doc.bound("kind", "ranked");
                doc.bound("states", a.n_states());
                doc.bound("minimal_states", minimize(a).n_states());
            }
            doc.emit(out);
            return 0;
        }

        if (minimize_cmd->parsed()) {
            std::string text = slurp(automaton_path);
            if (looks_counting(text))
                out << save_counting_dfta(minimize_counting(load_counting_dfta(text, complete_with_sink)));
            else
                out << save_dfta(minimize(load_dfta(text, complete_with_sink)));
            return 0;
        }

        if (run_cmd->parsed()) {
            Doc doc("run", as_text, timing);
            std::string text = slurp(automaton_path);
            doc.param("automaton", automaton_path);
            if (looks_counting(text)) {
                CountingDfta a = load_counting_dfta(text, complete_with_sink);
                UnrankedTree t = parse_unranked(tree_text(tree_arg), a.alphabet());
                int q = a.run(t);
                doc.j["status"] = a.is_final(q) ? "accept" : "reject";
                doc.bound("state", q);
            } else {
                Dfta a = load_dfta(text, complete_with_sink);
                Tree t = parse_tree(tree_text(tree_arg), a.alphabet());
                int q = a.run(t);
                doc.j["status"] = a.is_final(q) ? "accept" : "reject";
                doc.bound("state", q);
            }
            doc.emit(out);
            return 0;
        }

        if (ktype_cmd->parsed()) {
            Doc doc("ktype", as_text, timing);
            Dfta a = load_dfta(slurp(automaton_path), complete_with_sink);
            Tree t = parse_tree(tree_text(tree_arg), a.alphabet());
            NodePath path = path_from_string(path_arg);
            KType kt = ktype_of(t, path, k);
            doc.param("k", k);
            doc.param("path", path_to_string(path));
            doc.j["status"] = "ok";
            doc.witness(render_tree(kt.shape, a.alphabet()));
            doc.emit(out);
            return 0;
        }

        if (apply_cmd->parsed()) {
            Doc doc("apply-op", as_text, timing);
            std::vector<NodePath> nodes;
            std::stringstream ss(nodes_arg);
            std::string item;
            while (std::getline(ss, item, ';')) nodes.push_back(path_from_string(item));
            std::string text = slurp(automaton_path);
            doc.param("op", op_name);
            doc.param("k", k);
            if (looks_counting(text)) {
                CountingDfta a = load_counting_dfta(text, complete_with_sink);
                UnrankedTree t = parse_unranked(tree_text(tree_arg), a.alphabet());
                UOp op = op_name == "hstutter" ? UOp::HStutter
                         : op_name == "hswap"  ? UOp::HSwap
                         : op_name == "htransfer" ? UOp::HTransfer
                         : op_name == "vswap"     ? UOp::VSwap
                                                  : UOp::VStutter;
                int use_l = l > 0 ? l : a.threshold() + 1;
                UnrankedTree t2 = apply_unranked_op(op, t, nodes, k, use_l, !no_guard);
                doc.j["status"] = "ok";
                doc.witness(render_unranked(t2, a.alphabet()));
            } else {
                Dfta a = load_dfta(text, complete_with_sink);
                Tree t = parse_tree(tree_text(tree_arg), a.alphabet());
                Tree t2 = apply_guarded(guarded_op_from_string(op_name), t, nodes, k, !no_guard);
                doc.j["status"] = "ok";
                doc.witness(render_tree(t2, a.alphabet()));
            }
            doc.emit(out);
            return 0;
        }

        if (tame_cmd->parsed()) {
            Doc doc("tame", as_text, timing);
            std::string text = slurp(automaton_path);
            doc.param("budget", budget_steps);
            if (looks_counting(text)) {
                CountingDfta a = load_counting_dfta(text, complete_with_sink);
                int use_l = l > 0 ? l : a.threshold() + 1;
                doc.param("k", k);
                doc.param("l", use_l);
                ClosureVerdict v = is_kl_tame(a, k, use_l, budget);
                doc.j["status"] = to_string(v.status);
                if (v.uwitness) put_uop_witness(doc, *v.uwitness, a.alphabet());
                if (!v.note.empty()) doc.bound("note", v.note);
                put_explored(doc, v.explored);
                doc.emit(out);
                return status_exit(v.status);
            }
            Dfta a = load_dfta(text, complete_with_sink);
            if (k_given) {
                doc.param("k", k);
                ClosureVerdict v = is_k_tame(a, k, budget);
                doc.j["status"] = to_string(v.status);
                if (v.witness) put_op_witness(doc, *v.witness, a.alphabet());
                if (!v.note.empty()) doc.bound("note", v.note);
                put_explored(doc, v.explored);
                doc.emit(out);
                return status_exit(v.status);
            }
            TameResult r = is_tame(a, budget);
            doc.j["status"] = to_string(r.verdict.status);
            doc.bound("k0", r.k0);
            if (r.certified_k) doc.bound("certified_k", *r.certified_k);
            if (r.verdict.witness) put_op_witness(doc, *r.verdict.witness, a.alphabet());
            if (!r.verdict.note.empty()) doc.bound("note", r.verdict.note);
            doc.emit(out);
            return status_exit(r.verdict.status);
        }

        if (testable_cmd->parsed()) {
            Doc doc("testable", as_text, timing);
            std::string text = slurp(automaton_path);
            doc.param("kappa", kappa);
            doc.param("budget", budget_steps);
            if (looks_counting(text)) {
                CountingDfta a = load_counting_dfta(text, complete_with_sink);
                doc.param("lambda", lambda);
                ClosureVerdict v = is_kl_testable(a, kappa, lambda, budget);
                doc.j["status"] = to_string(v.status);
                if (v.uwitness_pair) {
                    doc.witness(render_unranked(v.uwitness_pair->first, a.alphabet()));
                    doc.witness(render_unranked(v.uwitness_pair->second, a.alphabet()));
                }
                if (!v.note.empty()) doc.bound("note", v.note);
                put_explored(doc, v.explored);
                doc.emit(out);
                return status_exit(v.status);
            }
            Dfta a = load_dfta(text, complete_with_sink);
            ClosureVerdict v = is_kappa_testable(a, kappa, budget);
            doc.j["status"] = to_string(v.status);
            if (v.witness_pair) {
                doc.witness(render_tree(v.witness_pair->first, a.alphabet()));
                doc.witness(render_tree(v.witness_pair->second, a.alphabet()));
            }
            if (!v.note.empty()) doc.bound("note", v.note);
            put_explored(doc, v.explored);
            doc.emit(out);
            return status_exit(v.status);
        }

        if (lt_cmd->parsed()) {
            Doc doc("decide-lt", as_text, timing);
            Dfta a = load_dfta(slurp(automaton_path), complete_with_sink);
            DecideLtLimits limits;
            limits.max_kappa = max_kappa;
            limits.budget = budget;
            doc.param("max_kappa", max_kappa);
            doc.param("budget", budget_steps);
            LtVerdict v = decide_lt(a, limits);
            doc.j["status"] = to_string(v.status);
            doc.bound("reason", to_string(v.reason));
            doc.bound("via", v.via);
            if (v.kappa) doc.bound("kappa", *v.kappa);
            if (v.tame_at_k) doc.bound("tame_at_k", *v.tame_at_k);
            if (v.closure_witness) put_op_witness(doc, *v.closure_witness, a.alphabet());
            for (const auto& w : v.witness_terms) doc.witness(w);
            put_explored(doc, v.explored);
            doc.emit(out);
            return status_exit(v.status);
        }

        if (ilt_cmd->parsed() || alt_cmd->parsed()) {
            bool ilt = ilt_cmd->parsed();
            Doc doc(ilt ? "decide-ilt" : "decide-alt", as_text, timing);
            CountingDfta a = load_counting_dfta(slurp(automaton_path), complete_with_sink);
            DecideUnrankedLimits limits;
            limits.max_kappa = max_kappa;
            limits.max_lambda = std::max(lambda, a.threshold() + 1);
            limits.budget = budget;
            doc.param("budget", budget_steps);
            LtVerdict v = ilt ? decide_ilt(a, limits) : decide_alt(a, limits);
            doc.j["status"] = to_string(v.status);
            doc.bound("reason", to_string(v.reason));
            doc.bound("via", v.via);
            if (v.kappa) doc.bound("kappa", *v.kappa);
            if (v.lambda) doc.bound("lambda", *v.lambda);
            if (v.tame_at_k) doc.bound("tame_at_k", *v.tame_at_k);
            if (v.tame_at_l) doc.bound("tame_at_l", *v.tame_at_l);
            if (v.uclosure_witness) put_uop_witness(doc, *v.uclosure_witness, a.alphabet());
            doc.emit(out);
            return status_exit(v.status);
        }

        if (oracle_cmd->parsed()) {
            Doc doc("oracle-" + oracle_mode, as_text, timing);
            if (oracle_mode == "semigroup") {
                if (word_dfa_path.empty()) throw std::runtime_error("--word-dfa required");
                WordDfa d = load_word_dfa(slurp(word_dfa_path));
                SyntacticSemigroup s = syntactic_semigroup(d);
                bool eq = lt_equations_hold(s);
                doc.j["status"] = eq ? "equations-hold" : "equations-fail";
                doc.bound("elements", s.elements.size());
                doc.bound("idempotents", s.idempotents.size());
                doc.emit(out);
                return 0;
            }
            if (automaton_path.empty()) throw std::runtime_error("--automaton required");
            Dfta a = load_dfta(slurp(automaton_path), complete_with_sink);
            doc.param("max_nodes", max_nodes);
            if (oracle_mode == "closure") {
                doc.param("op", op_name);
                doc.param("k", k);
                ClosureVerdict v = brute_closure(a, guarded_op_from_string(op_name), k, max_nodes);
                doc.j["status"] = to_string(v.status);
                if (v.witness) put_op_witness(doc, *v.witness, a.alphabet());
                if (!v.note.empty()) doc.bound("note", v.note);
                put_explored(doc, v.explored);
            } else {
                doc.param("kappa", kappa);
                ClosureVerdict v = brute_testable(a, kappa, max_nodes);
                doc.j["status"] = to_string(v.status);
                if (v.witness_pair) {
                    doc.witness(render_tree(v.witness_pair->first, a.alphabet()));
                    doc.witness(render_tree(v.witness_pair->second, a.alphabet()));
                }
                if (!v.note.empty()) doc.bound("note", v.note);
                put_explored(doc, v.explored);
            }
            doc.emit(out);
            return 0;
        }

        if (random_cmd->parsed()) {
            if (unranked_random) {
                UnrankedAlphabet alphabet;
                std::stringstream ss(alphabet_spec);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    auto colon = item.find(':');
                    alphabet.symbols.push_back(colon == std::string::npos ? item
                                                                          : item.substr(0, colon));
                }
                out << save_counting_dfta(random_counting_dfta(alphabet, n_states, m_threshold, seed));
            } else {
                std::vector<Symbol> syms;
                std::stringstream ss(alphabet_spec);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    auto colon = item.find(':');
                    if (colon == std::string::npos)
                        throw std::runtime_error("alphabet spec needs name:arity");
                    syms.push_back({item.substr(0, colon), std::stoi(item.substr(colon + 1))});
                }
                out << save_dfta(random_dfta(RankedAlphabet(std::move(syms)), n_states, seed));
            }
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 1;
}

}  // namespace ltt
