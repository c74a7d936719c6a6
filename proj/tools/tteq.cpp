// Command-line front end.
//
// Exit codes: 0 success or equivalent, 1 not equivalent (or a negative
// answer such as an undefined translation), 2 usage or format error,
// 3 resource budget exceeded, 4 internal self-check failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "tteq/domain.hpp"
#include "tteq/dtop_equiv.hpp"
#include "tteq/earliest.hpp"
#include "tteq/error.hpp"
#include "tteq/io.hpp"
#include "tteq/lookahead.hpp"
#include "tteq/monadic.hpp"
#include "tteq/parikh.hpp"

using namespace tteq;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kResource = 3;
constexpr int kInternal = 4;

// Any transducer kind that can be turned into an Mtt.
Mtt as_mtt(const Document& d, const std::string& path) {
  if (auto* m = std::get_if<Mtt>(&d)) return *m;
  if (auto* a = std::get_if<AxiomDtop>(&d)) return to_mtt(*a);
  if (auto* b = std::get_if<Butt>(&d)) return from_bottom_up(*b);
  throw FormatError("expected a transducer, found kind '" + kind_of(d) + "'", 1, path);
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write file", 0, path);
  out << text;
}

int report_dtop(const DtopEquivResult& r) {
  switch (r.verdict) {
    case EquivVerdict::Equivalent:
      std::cout << "equivalent\n";
      return kOk;
    case EquivVerdict::DomainMismatch:
      std::cout << "not equivalent; domains differ on " << r.witness->to_string() << "\n";
      return kNegative;
    case EquivVerdict::OutputMismatch:
      std::cout << "not equivalent; witness " << r.witness->to_string() << "\n";
      return kNegative;
  }
  return kInternal;
}

struct Options {
  std::string file, file2, input, hole, automaton, domain, out, cls, mode;
  std::vector<std::string> files;
  std::size_t max_len = 10;
  std::size_t cutoff = 16;
};

int cmd_validate(const Options& o) {
  Document d = read_document(o.file);
  std::vector<std::string> problems;
  if (auto* m = std::get_if<Mtt>(&d))
    for (const auto& p : validate(*m)) problems.push_back(p.to_string());
  if (auto* b = std::get_if<Butt>(&d))
    for (const auto& p : validate(*b)) problems.push_back(p.to_string());
  if (auto* y = std::get_if<YdtFc>(&d)) problems = validate(*y);
  for (const auto& p : problems) std::cout << p << "\n";
  if (!problems.empty()) return kUsage;
  std::cout << "ok: " << kind_of(d) << "\n";
  return kOk;
}

int cmd_run(const Options& o) {
  Document d = read_document(o.file);
  auto print_tree = [](const std::optional<Tree>& t) {
    std::cout << (t ? t->to_string() : "undefined") << "\n";
    return t ? kOk : kNegative;
  };
  if (auto* a = std::get_if<Dbta>(&d)) {
    bool yes = a->accepts(parse_tree(o.input, a->alphabet()));
    std::cout << (yes ? "accepted" : "rejected") << "\n";
    return yes ? kOk : kNegative;
  }
  if (auto* y = std::get_if<YdtFc>(&d)) {
    auto w = eval(*y, parse_tree(o.input, y->input()));
    if (!w) {
      std::cout << "undefined\n";
      return kNegative;
    }
    for (std::size_t i = 0; i < w->size(); ++i) std::cout << (i ? " " : "") << (*w)[i];
    std::cout << "\n";
    return kOk;
  }
  if (auto* b = std::get_if<Butt>(&d)) return print_tree(eval(*b, parse_tree(o.input, b->input())));
  if (auto* a = std::get_if<AxiomDtop>(&d)) return print_tree(eval(*a, parse_tree(o.input, a->input)));
  Mtt m = as_mtt(d, o.file);
  return print_tree(eval(m, parse_tree(o.input, m.input())));
}

// Input term for a partial evaluation. A leaf x at the hole is replaced by
// some leaf symbol, since only the context above the hole matters without
// look-ahead.
Tree partial_input(const Options& o, const RankedAlphabet& in) {
  Tree t = parse_term(o.input);
  Path u = Path::parse(o.hole);
  if (contains_path(t, u) && is_hole(label_at(t, u))) {
    auto leaves = in.of_rank(0);
    if (leaves.empty()) throw InvalidArgument("input alphabet has no leaf symbol");
    t = replace_at(t, u, Tree::leaf(leaves.front()));
  }
  check_tree(t, in);
  return t;
}

int cmd_run_partial(const Options& o) {
  Mtt m = as_mtt(read_document(o.file), o.file);
  auto t = eval_partial(m, partial_input(o, m.input()), Path::parse(o.hole));
  std::cout << (t ? t->to_string() : "undefined") << "\n";
  return t ? kOk : kNegative;
}

int cmd_balance(const Options& o) {
  Mtt m1 = as_mtt(read_document(o.file), o.file);
  Mtt m2 = as_mtt(read_document(o.file2), o.file2);
  Balance b = balance(m1, m2, partial_input(o, m1.input()), Path::parse(o.hole));
  std::cout << "h-balance: " << b.h_balance << "\ns-balance: " << b.s_balance << "\n";
  return kOk;
}

int cmd_domain(const Options& o) {
  Document d = read_document(o.file);
  if (auto* y = std::get_if<YdtFc>(&d)) write_or_print(o.out, to_text(domain_automaton(*y)));
  else write_or_print(o.out, to_text(domain_automaton(as_mtt(d, o.file))));
  return kOk;
}

int cmd_preimage(const Options& o) {
  Mtt m = as_mtt(read_document(o.file), o.file);
  Dbta b = read_as<Dbta>(o.automaton);
  write_or_print(o.out, to_text(inverse_regular(m, b)));
  return kOk;
}

int cmd_canonical(const Options& o) {
  Mtt m = as_mtt(read_document(o.file), o.file);
  write_or_print(o.out, to_text(canonical(m)));
  return kOk;
}

int cmd_equiv(const Options& o) {
  if (o.cls == "fc-string") {
    YdtFc m1 = read_as<YdtFc>(o.file), m2 = read_as<YdtFc>(o.file2);
    std::optional<Dbta> d;
    if (!o.domain.empty()) d = read_as<Dbta>(o.domain);
    FcEquivResult r = decide_equiv_fc(m1, m2, d, o.cutoff);
    switch (r.verdict) {
      case FcVerdict::Equivalent:
        std::cout << "equivalent\n";
        return kOk;
      case FcVerdict::DomainMismatch:
        std::cout << "not equivalent; domains differ on " << r.witness->to_string() << "\n";
        return kNegative;
      case FcVerdict::NotEquivalent:
        std::cout << "not equivalent; letters " << r.a << " and " << r.b << " meet at one position";
        if (r.witness) std::cout << "; witness " << r.witness->to_string();
        std::cout << "\n";
        return kNegative;
    }
    return kInternal;
  }
  Mtt m1 = as_mtt(read_document(o.file), o.file);
  Mtt m2 = as_mtt(read_document(o.file2), o.file2);
  if (!o.domain.empty()) throw InvalidArgument("--domain is only supported with --class fc-string");
  if (o.cls == "total-dtop") {
    TotalEquivResult r = equiv_total_dtop(m1, m2);
    if (r.equal) {
      std::cout << "equivalent; canonical form: " << r.canonical1.num_rules() << " rules\n";
      return kOk;
    }
    std::cout << "not equivalent; witness " << r.witness->to_string() << "\n";
    return kNegative;
  }
  if (o.cls == "dtop" || o.cls == "butt") return report_dtop(decide_equiv_dtop(m1, m2));
  if (o.cls == "monadic-mtt") {
    MonadicEquivResult r = decide_equiv_monadic(m1, m2, o.max_len);
    switch (r.verdict) {
      case MonadicVerdict::NoCounterexample:
        std::cout << "no counterexample up to length " << r.max_len << " (" << r.configurations
                  << " configurations)\n";
        return kOk;
      case MonadicVerdict::DomainMismatch:
        std::cout << "not equivalent; domains differ on " << r.witness->to_string() << "\n";
        return kNegative;
      case MonadicVerdict::NotEquivalent:
        std::cout << "not equivalent; witness " << r.witness->to_string() << "\n";
        return kNegative;
    }
  }
  throw InvalidArgument("unknown class '" + o.cls + "'");
}

int cmd_convert(const Options& o) {
  if (o.mode == "from-butt") {
    write_or_print(o.out, to_text(from_bottom_up(read_as<Butt>(o.file))));
    return kOk;
  }
  Mtt m1 = as_mtt(read_document(o.file), o.file);
  Mtt m2 = o.file2.empty() ? m1 : as_mtt(read_document(o.file2), o.file2);
  LookaheadElimination el = eliminate_lookahead_pair(m1, m2);
  std::string text = "# first transducer\n" + to_text(el.n1);
  if (!o.file2.empty()) text += "\n# second transducer\n" + to_text(el.n2);
  text += "\n# correctly annotated inputs\n" + to_text(el.e);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_or_print(o.out + "-1.tt", to_text(el.n1));
    if (!o.file2.empty()) write_or_print(o.out + "-2.tt", to_text(el.n2));
    write_or_print(o.out + "-domain.tt", to_text(el.e));
  }
  return kOk;
}

int cmd_export_hdt0l(const Options& o) {
  Mtt m1 = as_mtt(read_document(o.file), o.file);
  Mtt m2 = as_mtt(read_document(o.file2), o.file2);
  write_or_print(o.out, reduce_monadic(m1, m2).instance.to_text());
  return kOk;
}

int cmd_parikh(const Options& o) {
  write_or_print(o.out, parikh_image(read_as<Cfg>(o.file)).to_string());
  return kOk;
}

int cmd_gen_hard(const Options& o) {
  std::vector<Mtt> automata;
  for (const auto& f : o.files) automata.push_back(as_mtt(read_document(f), f));
  HardInstance h = gen_hard_instance(automata);
  if (o.out.empty()) {
    std::cout << "# first transducer\n" << to_text(h.m1) << "\n# second transducer\n" << to_text(h.m2);
  } else {
    write_or_print(o.out + "-1.tt", to_text(h.m1));
    write_or_print(o.out + "-2.tt", to_text(h.m2));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree transducer equivalence workbench"};
  app.require_subcommand(1);
  Options o;
  int (*handler)(const Options&) = nullptr;
  auto add = [&](const std::string& name, const std::string& help, int (*h)(const Options&)) {
    CLI::App* c = app.add_subcommand(name, help);
    c->callback([&handler, h] { handler = h; });
    return c;
  };

  auto* v = add("validate", "Parse and check a document", cmd_validate);
  v->add_option("file", o.file)->required();

  auto* r = add("run", "Evaluate on an input term", cmd_run);
  r->add_option("file", o.file)->required();
  r->add_option("--input", o.input, "input term")->required();

  auto* rp = add("run-partial", "Evaluate on an input with a hole", cmd_run_partial);
  rp->add_option("file", o.file)->required();
  rp->add_option("--input", o.input, "input term; the hole is the leaf x")->required();
  rp->add_option("--hole", o.hole, "Dewey path of the hole, e.g. 1.1 (empty for the root)")->required();

  auto* b = add("balance", "Height and size balance on a partial input", cmd_balance);
  b->add_option("file1", o.file)->required();
  b->add_option("file2", o.file2)->required();
  b->add_option("--input", o.input)->required();
  b->add_option("--hole", o.hole)->required();

  auto* d = add("domain", "Automaton for the domain", cmd_domain);
  d->add_option("file", o.file)->required();
  d->add_option("-o,--output", o.out);

  auto* p = add("preimage", "Automaton for the inverse image of a tree language", cmd_preimage);
  p->add_option("file", o.file)->required();
  p->add_option("--automaton", o.automaton, "dbta file")->required();
  p->add_option("-o,--output", o.out);

  auto* c = add("canonical", "Canonical earliest form of a total DTOP", cmd_canonical);
  c->add_option("file", o.file)->required();
  c->add_option("-o,--output", o.out);

  auto* e = add("equiv", "Decide equivalence", cmd_equiv);
  e->add_option("--class", o.cls)
      ->required()
      ->check(CLI::IsMember({"total-dtop", "dtop", "butt", "monadic-mtt", "fc-string"}));
  e->add_option("file1", o.file)->required();
  e->add_option("file2", o.file2)->required();
  e->add_option("--max-len", o.max_len, "index word bound for monadic-mtt");
  e->add_option("--domain", o.domain, "dbta restricting the inputs (fc-string)");
  e->add_option("--cutoff", o.cutoff, "state sequence bound for fc-string");

  auto* cv = add("convert", "Conversions", cmd_convert);
  cv->add_option("mode", o.mode)->required()->check(CLI::IsMember({"from-butt", "eliminate-la"}));
  cv->add_option("file", o.file)->required();
  cv->add_option("file2", o.file2);
  cv->add_option("-o,--output", o.out, "output file, or prefix for eliminate-la");

  auto* h = add("export-hdt0l", "HDT0L instance of two monadic transducers", cmd_export_hdt0l);
  h->add_option("file1", o.file)->required();
  h->add_option("file2", o.file2)->required();
  h->add_option("-o,--output", o.out);

  auto* pk = add("parikh", "Semilinear Parikh image of a grammar", cmd_parikh);
  pk->add_option("grammar", o.file)->required();
  pk->add_option("-o,--output", o.out);

  auto* g = add("gen-hard", "Equivalence instance from intersection emptiness", cmd_gen_hard);
  g->add_option("automata", o.files, "partial identity DTOPs")->required();
  g->add_option("-o,--output", o.out, "prefix for the two output files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }
  try {
    return handler(o);
  } catch (const ResourceError& err) {
    std::cerr << "resource limit: " << err.what() << "\n";
    return kResource;
  } catch (const InternalError& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return kInternal;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  }
}
