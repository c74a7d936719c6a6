#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tteq/domain.hpp"
#include "tteq/dtop_equiv.hpp"
#include "tteq/earliest.hpp"
#include "tteq/error.hpp"
#include "tteq/io.hpp"
#include "tteq/lookahead.hpp"
#include "tteq/monadic.hpp"
#include "tteq/parikh.hpp"

namespace py = pybind11;
using namespace tteq;

namespace {

// Owned document; a plain class so that the variant caster does not apply.
struct Doc {
  Document d;
};

Mtt as_mtt(const Document& d) {
  if (auto* m = std::get_if<Mtt>(&d)) return *m;
  if (auto* a = std::get_if<AxiomDtop>(&d)) return to_mtt(*a);
  if (auto* b = std::get_if<Butt>(&d)) return from_bottom_up(*b);
  throw InvalidArgument("expected a transducer, found kind '" + kind_of(d) + "'");
}

template <class T>
const T& require(const Document& d, const char* what) {
  if (auto* v = std::get_if<T>(&d)) return *v;
  throw InvalidArgument(std::string("expected ") + what + ", found kind '" + kind_of(d) + "'");
}

std::optional<std::string> show(const std::optional<Tree>& t) {
  if (!t) return std::nullopt;
  return t->to_string();
}

// Result of a run: a term, a word, a bool for automata, None when undefined.
py::object run(const Document& d, const std::string& input) {
  if (auto* a = std::get_if<Dbta>(&d)) return py::bool_(a->accepts(parse_tree(input, a->alphabet())));
  if (auto* a = std::get_if<Dfa>(&d)) {
    std::vector<std::string> word;
    std::istringstream in(input);
    for (std::string w; in >> w;) word.push_back(w);
    return py::bool_(a->accepts(word));
  }
  if (auto* y = std::get_if<YdtFc>(&d)) {
    auto w = eval(*y, parse_tree(input, y->input()));
    return w ? py::cast(*w) : py::none();
  }
  std::optional<Tree> t;
  if (auto* b = std::get_if<Butt>(&d)) t = eval(*b, parse_tree(input, b->input()));
  else if (auto* a = std::get_if<AxiomDtop>(&d)) t = eval(*a, parse_tree(input, a->input));
  else {
    Mtt m = as_mtt(d);
    t = eval(m, parse_tree(input, m.input()));
  }
  return t ? py::cast(t->to_string()) : py::none();
}

// The leaf x at the hole stands for any input there; a real leaf is
// substituted since only the context above the hole is evaluated.
Tree partial_input(const std::string& input, const Path& u, const RankedAlphabet& in) {
  Tree t = parse_term(input);
  if (contains_path(t, u) && is_hole(label_at(t, u))) {
    auto leaves = in.of_rank(0);
    if (leaves.empty()) throw InvalidArgument("input alphabet has no leaf symbol");
    t = replace_at(t, u, Tree::leaf(leaves.front()));
  }
  check_tree(t, in);
  return t;
}

std::vector<std::string> problems(const Document& d) {
  std::vector<std::string> out;
  if (auto* m = std::get_if<Mtt>(&d))
    for (const auto& p : validate(*m)) out.push_back(p.to_string());
  if (auto* b = std::get_if<Butt>(&d))
    for (const auto& p : validate(*b)) out.push_back(p.to_string());
  if (auto* y = std::get_if<YdtFc>(&d)) out = validate(*y);
  return out;
}

py::dict equiv(const Document& a, const Document& b, const std::string& cls, std::size_t max_len,
               const std::optional<Document>& domain, std::size_t cutoff) {
  py::dict r;
  if (cls == "fc-string") {
    std::optional<Dbta> d;
    if (domain) d = require<Dbta>(*domain, "a dbta");
    FcEquivResult res = decide_equiv_fc(require<YdtFc>(a, "a ydt"), require<YdtFc>(b, "a ydt"), d, cutoff);
    r["verdict"] = to_string(res.verdict);
    r["witness"] = show(res.witness);
    r["letters"] = res.a.empty() ? py::none() : py::object(py::make_tuple(res.a, res.b));
    return r;
  }
  if (domain) throw InvalidArgument("a domain is only supported for fc-string");
  Mtt m1 = as_mtt(a), m2 = as_mtt(b);
  if (cls == "total-dtop") {
    TotalEquivResult res = equiv_total_dtop(m1, m2);
    r["verdict"] = res.equal ? "equivalent" : "output mismatch";
    r["witness"] = show(res.witness);
    r["canonical"] = res.equal ? py::object(py::str(to_text(res.canonical1))) : py::none();
    return r;
  }
  if (cls == "dtop" || cls == "butt") {
    DtopEquivResult res = decide_equiv_dtop(m1, m2);
    r["verdict"] = to_string(res.verdict);
    r["witness"] = show(res.witness);
    r["bound"] = res.bound;
    return r;
  }
  if (cls == "monadic-mtt") {
    MonadicEquivResult res = decide_equiv_monadic(m1, m2, max_len);
    r["verdict"] = to_string(res.verdict);
    r["witness"] = show(res.witness);
    r["max_len"] = res.max_len;
    return r;
  }
  throw InvalidArgument("unknown class '" + cls + "'");
}

}  // namespace

PYBIND11_MODULE(_tteq, m) {
  m.doc() = "Tree transducer equivalence workbench";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<AlphabetError>(m, "AlphabetError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<InternalError>(m, "InternalError", base.ptr());

  py::class_<Doc>(m, "Document")
      .def_property_readonly("kind", [](const Doc& d) { return kind_of(d.d); })
      .def("to_text", [](const Doc& d) { return to_text(d.d); })
      .def("validate", [](const Doc& d) { return problems(d.d); }, "Structural problems; empty when well formed.")
      .def("run", [](const Doc& d, const std::string& input) { return run(d.d, input); }, py::arg("input"))
      .def("__repr__", [](const Doc& d) { return "<tteq.Document kind=" + kind_of(d.d) + ">"; });

  m.def("parse", [](const std::string& text) { return Doc{parse_document(text)}; }, py::arg("text"));
  m.def("load", [](const std::string& path) { return Doc{read_document(path)}; }, py::arg("path"));
  m.def("normalize_term", [](const std::string& t) { return parse_term(t).to_string(); }, py::arg("term"));

  m.def(
      "run_partial",
      [](const Doc& d, const std::string& input, const std::string& hole) {
        Mtt m = as_mtt(d.d);
        Path u = Path::parse(hole);
        return show(eval_partial(m, partial_input(input, u, m.input()), u));
      },
      py::arg("doc"), py::arg("input"), py::arg("hole"));
  m.def(
      "balance",
      [](const Doc& a, const Doc& b, const std::string& input, const std::string& hole) {
        Mtt m1 = as_mtt(a.d), m2 = as_mtt(b.d);
        Path u = Path::parse(hole);
        Balance r = balance(m1, m2, partial_input(input, u, m1.input()), u);
        return py::make_tuple(r.h_balance, r.s_balance);
      },
      py::arg("doc1"), py::arg("doc2"), py::arg("input"), py::arg("hole"));
  m.def(
      "domain",
      [](const Doc& d) -> Doc {
        if (auto* y = std::get_if<YdtFc>(&d.d)) return Doc{domain_automaton(*y)};
        return Doc{domain_automaton(as_mtt(d.d))};
      },
      py::arg("doc"));
  m.def(
      "preimage",
      [](const Doc& d, const Doc& b) -> Doc {
        return Doc{inverse_regular(as_mtt(d.d), require<Dbta>(b.d, "a dbta"))};
      },
      py::arg("doc"), py::arg("automaton"));
  m.def("canonical", [](const Doc& d) -> Doc { return Doc{canonical(as_mtt(d.d))}; }, py::arg("doc"));
  m.def(
      "equiv",
      [](const Doc& a, const Doc& b, const std::string& cls, std::size_t max_len, const Doc* domain,
         std::size_t cutoff) {
        return equiv(a.d, b.d, cls, max_len, domain ? std::optional<Document>(domain->d) : std::nullopt, cutoff);
      },
      py::arg("doc1"), py::arg("doc2"), py::arg("cls") = "dtop", py::arg("max_len") = 10,
      py::arg("domain") = nullptr, py::arg("cutoff") = 16);
  m.def(
      "from_bottom_up", [](const Doc& d) -> Doc { return Doc{from_bottom_up(require<Butt>(d.d, "a butt"))}; },
      py::arg("doc"));
  m.def(
      "hdt0l", [](const Doc& a, const Doc& b) { return reduce_monadic(as_mtt(a.d), as_mtt(b.d)).instance.to_text(); },
      py::arg("doc1"), py::arg("doc2"));
  m.def(
      "parikh_image", [](const Doc& g) { return parikh_image(require<Cfg>(g.d, "a cfg")).to_string(); },
      py::arg("grammar"));
  m.def(
      "gen_hard",
      [](const std::vector<Doc>& docs) {
        std::vector<Mtt> automata;
        for (const auto& d : docs) automata.push_back(as_mtt(d.d));
        HardInstance h = gen_hard_instance(automata);
        return py::make_tuple(Doc{h.m1}, Doc{h.m2});
      },
      py::arg("automata"));
}
