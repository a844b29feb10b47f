#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "traceprod/json_io.hpp"
#include "traceprod/oracle.hpp"

using namespace traceprod;

namespace {

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case Err::ConstructionFailed:
    case Err::SolveFailed:
    case Err::EmbedSearchFailed:
    case Err::MrTooSmall:
      return 3;
    case Err::Usage:
    case Err::ParseError:
    case Err::ScalarClass:
    case Err::DetNotOne:
    case Err::UnsupportedCase:
    case Err::HypothesisViolated:
    case Err::PreconditionViolated:
    case Err::IrreducibleOmega:
    case Err::NotPrime:
    case Err::ReducibleModulus:
    case Err::DimensionMismatch:
    case Err::MixedFields:
    case Err::NoLU:
    case Err::NotCyclic:
      return 4;
    case Err::BudgetExceeded:
    case Err::TooLarge:
    case Err::FieldTooLarge:
      return 5;
    default:
      return 1;
  }
}

// q -> (p, k)
std::pair<uint32_t, uint32_t> factor_prime_power(uint32_t q) {
  if (q < 2) throw Error(Err::Usage, "field size must be at least 2");
  uint32_t p = q;
  for (uint32_t d = 2; d * d <= q; ++d)
    if (q % d == 0) {
      p = d;
      break;
    }
  uint32_t k = 0, v = q;
  while (v % p == 0) {
    v /= p;
    ++k;
  }
  if (v != 1) throw Error(Err::Usage, std::to_string(q) + " is not a prime power");
  return {p, k};
}

struct CommonOpts {
  uint32_t q = 0;
  int n = 0;
  std::string group = "GL";
  uint64_t seed = kDefaultSeed;
  uint64_t budget = kDefaultOrbitBudget;
  std::string output;
  int jobs = 1;
};

FieldCtx make_field(uint32_t q, const std::vector<uint32_t>& modulus) {
  auto [p, k] = factor_prime_power(q);
  std::optional<std::vector<uint32_t>> mod;
  if (!modulus.empty()) mod = modulus;
  return FieldCtx(p, k, mod, FieldCtx::kHardMaxOrder);
}

void emit(const ordered_json& j, const std::string& output) {
  std::string text = j.dump(2);
  if (output.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream os(output);
    os << text << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constructive trace-of-class-product toolkit for small finite fields"};
  app.require_subcommand(1);

  CommonOpts opt;
  std::vector<uint32_t> modulus;
  if (const char* env = std::getenv("TRACEPROD_BUDGET")) opt.budget = std::strtoull(env, nullptr, 10);

  auto add_common = [&](CLI::App* sub, bool with_group = true) {
    sub->add_option("--q", opt.q, "field size (prime power)")->required();
    sub->add_option("--modulus", modulus, "defining polynomial coefficients, constant first");
    sub->add_option("--seed", opt.seed, "seed for the deterministic searches");
    sub->add_option("--budget", opt.budget, "orbit enumeration budget");
    sub->add_option("--jobs", opt.jobs, "worker cap")->check(CLI::PositiveNumber);
    sub->add_option("-o,--output", opt.output, "write the JSON result to a file");
    if (with_group) sub->add_option("--group", opt.group, "M, GL or SL");
  };

  // classes
  auto* cls_cmd = app.add_subcommand("classes", "list classes in the class text format");
  add_common(cls_cmd);
  cls_cmd->add_option("--n", opt.n, "matrix size")->required();

  // witness
  std::string omega_text, psi_text, tau_text;
  auto* wit_cmd = app.add_subcommand("witness", "construct a verified witness pair");
  add_common(wit_cmd);
  wit_cmd->add_option("--n", opt.n, "matrix size")->required();
  wit_cmd->add_option("--omega", omega_text, "first class")->required();
  wit_cmd->add_option("--psi", psi_text, "second class")->required();
  wit_cmd->add_option("--tau", tau_text, "target trace")->required();

  // trace-set
  bool early_exit = false;
  auto* ts_cmd = app.add_subcommand("trace-set", "oracle trace set of a class product");
  add_common(ts_cmd);
  ts_cmd->add_option("--n", opt.n, "matrix size")->required();
  ts_cmd->add_option("--omega", omega_text, "first class")->required();
  ts_cmd->add_option("--psi", psi_text, "second class")->required();
  ts_cmd->add_flag("--early-exit", early_exit, "stop once every trace has appeared");

  // product-classes
  auto* pc_cmd = app.add_subcommand("product-classes", "classes met by a class product");
  add_common(pc_cmd);
  pc_cmd->add_option("--n", opt.n, "matrix size")->required();
  pc_cmd->add_option("--omega", omega_text, "first class")->required();
  pc_cmd->add_option("--psi", psi_text, "second class")->required();

  // verify
  int theorem = 0;
  uint64_t sampled = 0;
  bool with_products = false;
  auto* ver_cmd = app.add_subcommand("verify", "verify a trace-surjectivity theorem");
  add_common(ver_cmd, /*with_group=*/false);
  ver_cmd->add_option("--n", opt.n, "matrix size")->required();
  ver_cmd->add_option("--theorem", theorem, "1 = similarity classes, 2 = SL classes")
      ->required()
      ->check(CLI::Range(1, 2));
  ver_cmd->add_option("--sampled", sampled, "sample this many pairs instead of all");
  ver_cmd->add_flag("--products", with_products, "also check product-class decompositions (SL)");

  // verify-gl2-claim
  auto* gl2_cmd = app.add_subcommand("verify-gl2-claim",
                                     "oracle check of the irreducible 2x2 full-trace claim");
  add_common(gl2_cmd, /*with_group=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  try {
    FieldCtx F = make_field(opt.q, modulus);

    if (cls_cmd->parsed()) {
      Group g = group_from_name(opt.group);
      ordered_json out;
      out["field"] = field_json(F);
      out["group"] = group_name(g);
      out["n"] = opt.n;
      ordered_json arr = ordered_json::array();
      for (auto& c : enumerate_classes(opt.n, F, g)) {
        ordered_json cj = class_json(c);
        cj["text"] = class_text(c);
        arr.push_back(cj);
      }
      out["classes"] = arr;
      emit(out, opt.output);
      std::cerr << "listed " << arr.size() << " classes of " << group_name(g) << "(" << opt.n
                << "," << opt.q << ")\n";
      return 0;
    }

    if (wit_cmd->parsed()) {
      Group g = group_from_name(opt.group);
      AnyClass om = parse_class_text(F, omega_text, g);
      AnyClass ps = parse_class_text(F, psi_text, g);
      uint16_t tau = parse_element(F, tau_text);
      auto res = witness(om, ps, tau, g, opt.seed);
      if (std::holds_alternative<TraceExcluded>(res)) {
        ordered_json out;
        out["omega"] = class_text(om);
        out["psi"] = class_text(ps);
        out["tau"] = elem_json(F, tau);
        out["excluded"] = elem_json(F, std::get<TraceExcluded>(res).value);
        out["witness"] = nullptr;
        emit(out, opt.output);
        std::cerr << "trace " << F.elem_text(tau) << " is the excluded value for this pair\n";
        return 2;
      }
      const auto& wp = std::get<WitnessPair>(res);
      emit(witness_json(om, ps, wp), opt.output);
      std::cerr << "verified witness via " << wp.path << "\n";
      return 0;
    }

    if (ts_cmd->parsed()) {
      Group g = group_from_name(opt.group);
      AnyClass om = parse_class_text(F, omega_text, g);
      AnyClass ps = parse_class_text(F, psi_text, g);
      auto ts = trace_set(om, ps, early_exit, opt.budget);
      ordered_json out;
      out["omega"] = class_text(om);
      out["psi"] = class_text(ps);
      out["trace_set"] = trace_set_json(ts);
      out["complete"] = ts.complete;
      emit(out, opt.output);
      std::cerr << "trace set has " << ts.members.size() << " of " << F.order() << " elements\n";
      return 0;
    }

    if (pc_cmd->parsed()) {
      Group g = group_from_name(opt.group);
      AnyClass om = parse_class_text(F, omega_text, g);
      AnyClass ps = parse_class_text(F, psi_text, g);
      auto decomp = class_product_decomposition(om, ps, opt.budget);
      ordered_json out;
      out["omega"] = class_text(om);
      out["psi"] = class_text(ps);
      ordered_json arr = ordered_json::array();
      for (auto& c : decomp) arr.push_back(class_text(c));
      out["product_classes"] = arr;
      emit(out, opt.output);
      std::cerr << "product meets " << arr.size() << " classes\n";
      return 0;
    }

    if (ver_cmd->parsed()) {
      Group g = (theorem == 1) ? Group::M_similarity : Group::SL;
      if (g == Group::SL && opt.n < 3)
        throw Error(Err::Usage, "the SL statement concerns n >= 3");
      VerifyMode mode = sampled ? VerifyMode::Sampled : VerifyMode::Exhaustive;
      auto rep = verify_theorem(opt.n, F, g, mode, sampled, opt.seed, opt.budget);
      if (with_products && g == Group::SL) {
        auto pc = product_class_check(opt.n, F, opt.budget);
        rep.data["product_check"] = pc.data;
        rep.ok = rep.ok && pc.ok;
        rep.seconds += pc.seconds;
      }
      emit(rep.data, opt.output);
      std::cerr << (rep.ok ? "verified" : "FAILURES FOUND") << " in " << rep.seconds << " s\n";
      return rep.ok ? 0 : 1;
    }

    if (gl2_cmd->parsed()) {
      auto rep = verify_gl2_irreducible_claim(F, opt.budget);
      emit(rep.data, opt.output);
      std::cerr << (rep.ok ? "claim holds" : "CLAIM FAILED") << " over GF(" << opt.q << ") in "
                << rep.seconds << " s\n";
      return rep.ok ? 0 : 1;
    }
  } catch (const Error& e) {
    emit(error_json(e), opt.output);
    std::cerr << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 4;
}
