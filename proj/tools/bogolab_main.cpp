// Command-line front end. Each subcommand is also the usage example for the
// corresponding library call, in the order a study would run them:
//
//   bogolab validate --model dimer:t=1,U=1
//   bogolab hartree  --model dimer:t=1,U=1
//   bogolab bog      --model dimer:t=1,U=1
//   bogolab exact    --model dimer:t=1,U=1 --N 16 --levels 4
//   bogolab compare  --model dimer:t=1,U=1 --N 8,16,32,64 --levels 4 --out runs/dimer
//   bogolab thm1     --model dimer:t=1,U=1 --N 16,32,64,128 --quanta 0,1,2
//   bogolab thm2     --model dimer:t=1,U=1 --lambda-index 1 --m 1 --N 100 --C-cal 10
//   bogolab thm3     --model dimer:t=1,U=1 --N 16,64,256 --level 2
//   bogolab multi    --model dimer:t=2,U=-3 --N 8,16,32 --levels 4
//
// Results go to stdout as JSON; the resolved configuration goes to stderr.
// Exit codes: 0 success, 1 computation error, 2 usage error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bogolab/bogolab.hpp"

namespace {

using namespace bogolab;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double num_arg(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "cannot parse number '" + s + "' for " + what);
  }
}

// Inline model syntax: kind:key=val,key=val. Anything else is a JSON file.
ModeProblem parse_model(const std::string& arg) {
  const auto colon = arg.find(':');
  const std::string kind = arg.substr(0, colon);
  if (kind != "dimer" && kind != "ring" && kind != "random") return problem_of_json(read_json(arg));

  std::map<std::string, std::string> kv;
  if (colon != std::string::npos && colon + 1 < arg.size())
    for (const auto& item : split(arg.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        fail(ErrorCode::InvalidArgument, "expected key=value, got '" + item + "'");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  auto take = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      if (fallback.empty()) fail(ErrorCode::InvalidArgument, kind + " model needs " + key + "=");
      return fallback;
    }
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  ModeProblem p;
  if (kind == "dimer") {
    const double t = num_arg(take("t", "1"), "t");
    const double U = num_arg(take("U", "1"), "U");
    p = build_dimer(t, U);
  } else if (kind == "ring") {
    const int L = static_cast<int>(num_arg(take("L", ""), "L"));
    const double t = num_arg(take("t", "1"), "t");
    const auto parts = split(take("vhat", ""), '/');
    std::vector<double> vhat;
    for (const auto& s : parts) vhat.push_back(num_arg(s, "vhat"));
    if (static_cast<int>(vhat.size()) == 1) vhat.assign(static_cast<std::size_t>(L), vhat[0]);
    p = build_ring(L, t, vhat);
  } else {
    const auto seed = static_cast<std::uint64_t>(num_arg(take("seed", "1"), "seed"));
    const int d = static_cast<int>(num_arg(take("d", "4"), "d"));
    const double strength = num_arg(take("strength", "0.1"), "strength");
    p = build_random(seed, d, strength);
  }
  if (!kv.empty()) fail(ErrorCode::InvalidArgument, "unknown model key '" + kv.begin()->first + "'");
  return p;
}

std::vector<int> parse_n_list(const std::string& arg) {
  std::vector<int> out;
  for (const auto& s : split(arg, ',')) {
    const double v = num_arg(s, "N");
    const int n = static_cast<int>(v);
    if (v != n || n < 2) fail(ErrorCode::InvalidArgument, "particle numbers must be integers >= 2");
    if (!out.empty() && n <= out.back())
      fail(ErrorCode::InvalidArgument, "particle numbers must be strictly increasing");
    out.push_back(n);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& arg, const std::string& what) {
  std::vector<int> out;
  for (const auto& s : split(arg, ',')) out.push_back(static_cast<int>(num_arg(s, what)));
  return out;
}

// Complex start vector, entries re/im separated by commas: "1/0,-1/0".
Vec parse_cvec(const std::string& arg) {
  const auto items = split(arg, ',');
  Vec v(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto parts = split(items[i], '/');
    if (parts.empty() || parts.size() > 2)
      fail(ErrorCode::InvalidArgument, "start entries are re or re/im");
    const double re = num_arg(parts[0], "start");
    const double im = parts.size() == 2 ? num_arg(parts[1], "start") : 0.0;
    v[static_cast<Eigen::Index>(i)] = Cx(re, im);
  }
  return v;
}

struct StateArgs {
  std::string state_file;
  std::string start;
  int starts = 32;
  std::uint64_t seed = 1;
};

void add_state_args(CLI::App* sub, StateArgs& a) {
  sub->add_option("--state", a.state_file, "expansion point from a saved state json");
  sub->add_option("--start", a.start, "solve from this start vector (entries re or re/im, comma separated)");
  sub->add_option("--starts", a.starts, "random multistart count for the minimizer search");
  sub->add_option("--seed", a.seed, "seed for the multistart search");
}

HartreeState resolve_state(const ModeProblem& p, const StateArgs& a) {
  if (!a.state_file.empty()) {
    const HartreeState loaded = state_of_json(read_json(a.state_file));
    return make_state(p, loaded.c);  // re-derive derived fields against this model
  }
  if (!a.start.empty()) return solve_stationary(p, parse_cvec(a.start));
  MinimizeOpts opts;
  opts.n_starts = a.starts;
  opts.seed = a.seed;
  const MinimizerSet ms = find_minimizers(p, opts);
  if (ms.states.empty()) fail(ErrorCode::NoConvergence, "no stationary point converged");
  return ms.states.front();
}

void print_config(const ModeProblem& p, const StateArgs* a) {
  std::cerr << "# model " << p.name << " d=" << p.d << " shift=" << fmt17(p.shift)
            << " threads=" << thread_budget();
  if (a) {
    if (!a->state_file.empty())
      std::cerr << " state=" << a->state_file;
    else if (!a->start.empty())
      std::cerr << " start=" << a->start;
    else
      std::cerr << " starts=" << a->starts << " seed=" << a->seed;
  }
  std::cerr << "\n";
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

void save_report(const std::string& prefix, const ComparisonReport& rep, const json& full) {
  write_text(prefix + ".csv", report_csv(rep));
  write_json(prefix + ".json", full);
  write_text(prefix + ".gp", report_gnuplot(prefix + ".csv", rep));
  std::cerr << "# wrote " << prefix << ".csv " << prefix << ".json " << prefix << ".gp\n";
}

json fits_or_note(const ComparisonReport& rep) {
  try {
    return to_json(convergence_fit(rep));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InsufficientData) return json(e.what());
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for mean-field excitation spectra of N-boson systems"};
  app.require_subcommand(1);
  std::string model_arg;
  app.add_option("--model,-m", model_arg, "model: dimer:t=1,U=1 | ring:L=3,t=1,vhat=0.3 | random:seed=11,d=5,strength=0.1 | file.json")
      ->required();

  // validate
  auto* c_validate = app.add_subcommand("validate", "run input checks and report the derived constants");
  std::string out_file;
  c_validate->add_option("--out", out_file, "also write the model json here");

  // hartree
  auto* c_hartree = app.add_subcommand("hartree", "find stationary points of the mean-field energy");
  StateArgs ha;
  add_state_args(c_hartree, ha);
  std::string hartree_out;
  c_hartree->add_option("--out", hartree_out, "write the selected state json here");
  bool hartree_all = false;
  c_hartree->add_flag("--all", hartree_all, "report every retained stationary point");

  // bog
  auto* c_bog = app.add_subcommand("bog", "excitation spectrum of the quadratic form at a state");
  StateArgs ba;
  add_state_args(c_bog, ba);

  // exact
  auto* c_exact = app.add_subcommand("exact", "lowest eigenvalues of the N-particle operator");
  StateArgs ea;
  add_state_args(c_exact, ea);
  int exact_n = 8, exact_levels = 6;
  std::string dump_matrix;
  c_exact->add_option("--N", exact_n, "particle number")->required();
  c_exact->add_option("--levels", exact_levels, "how many eigenvalues");
  c_exact->add_option("--dump-matrix", dump_matrix, "write the operator in matrix market form");

  // compare
  auto* c_compare = app.add_subcommand("compare", "exact spectrum against quadratic-form levels across N");
  StateArgs ca;
  add_state_args(c_compare, ca);
  std::string compare_ns, compare_out;
  int compare_levels = 4;
  c_compare->add_option("--N", compare_ns, "comma list of particle numbers, strictly increasing")->required();
  c_compare->add_option("--levels", compare_levels, "levels per N");
  c_compare->add_option("--out", compare_out, "prefix for csv/json/gnuplot files");

  // thm1
  auto* c_thm1 = app.add_subcommand("thm1", "residual-operator norms on fixed probes across N");
  StateArgs t1a;
  add_state_args(c_thm1, t1a);
  std::string thm1_ns, thm1_quanta = "0,1,2";
  c_thm1->add_option("--N", thm1_ns, "comma list of particle numbers")->required();
  c_thm1->add_option("--quanta", thm1_quanta, "probe sizes, comma list");

  // thm2
  auto* c_thm2 = app.add_subcommand("thm2", "eigenvalue existence window around a quadratic-form level");
  StateArgs t2a;
  add_state_args(c_thm2, t2a);
  int t2_index = 0, t2_m = 1, t2_n = 100;
  double t2_c = 10.0;
  c_thm2->add_option("--lambda-index", t2_index, "level index in the quadratic-form spectrum, 0 = ground");
  c_thm2->add_option("--m", t2_m, "multiplicity to certify");
  c_thm2->add_option("--N", t2_n, "particle number")->required();
  c_thm2->add_option("--C-cal", t2_c, "calibrated window constant");

  // thm3
  auto* c_thm3 = app.add_subcommand("thm3", "localized excitation image of an exact eigenvector across N");
  StateArgs t3a;
  add_state_args(c_thm3, t3a);
  std::string thm3_ns;
  int thm3_level = 1;
  c_thm3->add_option("--N", thm3_ns, "comma list of particle numbers")->required();
  c_thm3->add_option("--level", thm3_level, "exact level, 1 = ground");

  // multi
  auto* c_multi = app.add_subcommand("multi", "spectrum against the level union over all minimizers");
  std::string multi_ns, multi_out;
  int multi_levels = 4, multi_starts = 32;
  std::uint64_t multi_seed = 1;
  c_multi->add_option("--N", multi_ns, "comma list of particle numbers")->required();
  c_multi->add_option("--levels", multi_levels, "levels per N");
  c_multi->add_option("--starts", multi_starts, "random multistart count");
  c_multi->add_option("--seed", multi_seed, "seed for the multistart search");
  c_multi->add_option("--out", multi_out, "prefix for csv/json/gnuplot files");

  try {
    app.parse(argc, argv);
    const ModeProblem p = parse_model(model_arg);

    if (*c_validate) {
      print_config(p, nullptr);
      json j;
      j["d"] = p.d;
      j["name"] = p.name;
      j["shift"] = p.shift;
      j["ok"] = true;
      if (p.W2) j["c0"] = check_assumption_c0(p);
      emit(j);
      if (!out_file.empty()) write_json(out_file, to_json(p));
    } else if (*c_hartree) {
      print_config(p, &ha);
      json j;
      if (hartree_all) {
        MinimizeOpts opts;
        opts.n_starts = ha.starts;
        opts.seed = ha.seed;
        const MinimizerSet ms = find_minimizers(p, opts);
        json states = json::array();
        for (const auto& st : ms.states) states.push_back(to_json(st));
        j["states"] = std::move(states);
        j["continuous_family_suspected"] = ms.continuous_family_suspected;
        if (!hartree_out.empty() && !ms.states.empty()) write_json(hartree_out, to_json(ms.states.front()));
      } else {
        const HartreeState st = resolve_state(p, ha);
        j = to_json(st);
        if (!hartree_out.empty()) write_json(hartree_out, j);
      }
      emit(j);
    } else if (*c_bog) {
      print_config(p, &ba);
      const HartreeState st = resolve_state(p, ba);
      const BogoliubovSpectrum spec = diagonalize(quadratic_form(p, st));
      json j = to_json(spec);
      j["state"] = to_json(st);
      emit(j);
    } else if (*c_exact) {
      print_config(p, &ea);
      const SparseOperator hn = build_hn(p, exact_n);
      if (!dump_matrix.empty()) {
        std::ofstream os(dump_matrix, std::ios::binary);
        if (!os) fail(ErrorCode::IoError, "cannot open for write: " + dump_matrix);
        hn.write_matrix_market(os);
        std::cerr << "# wrote " << dump_matrix << "\n";
      }
      const int k = std::min<int>(exact_levels, static_cast<int>(hn.dim()));
      const EigResult eig = eig_lowest(hn, k);
      json j;
      j["N"] = exact_n;
      j["dim"] = hn.dim();
      json vals = json::array();
      for (Eigen::Index i = 0; i < eig.values.size(); ++i) vals.push_back(eig.values[i]);
      j["values"] = std::move(vals);
      emit(j);
    } else if (*c_compare) {
      print_config(p, &ca);
      const HartreeState st = resolve_state(p, ca);
      const ComparisonReport rep = compare_spectra(p, st, parse_n_list(compare_ns), compare_levels);
      json j;
      j["report"] = to_json(rep);
      j["fits"] = fits_or_note(rep);
      emit(j);
      if (!compare_out.empty()) save_report(compare_out, rep, j);
    } else if (*c_thm1) {
      print_config(p, &t1a);
      const HartreeState st = resolve_state(p, t1a);
      emit(to_json(thm1_scan(p, st, parse_n_list(thm1_ns), parse_int_list(thm1_quanta, "quanta"))));
    } else if (*c_thm2) {
      print_config(p, &t2a);
      const HartreeState st = resolve_state(p, t2a);
      emit(to_json(thm2_check(p, st, t2_index, t2_m, t2_n, t2_c)));
    } else if (*c_thm3) {
      print_config(p, &t3a);
      const HartreeState st = resolve_state(p, t3a);
      json j;
      j["rows"] = to_json(thm3_check(p, st, parse_n_list(thm3_ns), thm3_level));
      emit(j);
    } else if (*c_multi) {
      print_config(p, nullptr);
      std::cerr << "# starts=" << multi_starts << " seed=" << multi_seed << "\n";
      MinimizeOpts opts;
      opts.n_starts = multi_starts;
      opts.seed = multi_seed;
      const MultiReport rep = multi_condensate(p, parse_n_list(multi_ns), multi_levels, opts);
      const json j = to_json(rep);
      emit(j);
      if (!multi_out.empty()) save_report(multi_out, rep.report, j);
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << e.code_name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
