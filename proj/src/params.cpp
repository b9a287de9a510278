#include "cfp/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cfp {

namespace {

void require_positive(const Number& x, const char* what) {
  bool positive = x.is_exact() ? x.exact() > 0 : x.value() > 0.0;
  if (!positive || !std::isfinite(x.value())) {
    throw Error(ErrorCode::invalid_argument,
                std::string(what) + " must be positive, got " + x.to_string());
  }
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

ParameterFunction ParameterFunction::power_law(Number p) {
  require_positive(p, "power-law exponent p");
  return ParameterFunction(PowerLaw{std::move(p)});
}

ParameterFunction ParameterFunction::ewens(Number beta) {
  require_positive(beta, "Ewens parameter beta");
  return ParameterFunction(Ewens{std::move(beta)});
}

ParameterFunction ParameterFunction::table(std::vector<Number> values) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "table must be nonempty");
  for (const auto& v : values) require_positive(v, "table entry");
  return ParameterFunction(Table{std::move(values)});
}

ParameterFunction rescale(const ParameterFunction& f, Number R) {
  require_positive(R, "rescale factor R");
  ParameterFunction g(ParameterFunction::Rescaled{std::make_shared<const ParameterFunction>(f), std::move(R)});
  g.declared_ = f.declared_;
  return g;
}

ParameterFunction::Kind ParameterFunction::kind() const {
  return static_cast<Kind>(data_.index());
}

bool ParameterFunction::has_exact() const {
  return std::visit(
      [](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return d.p.is_integer();
        } else if constexpr (std::is_same_v<T, Ewens>) {
          return d.beta.is_exact();
        } else if constexpr (std::is_same_v<T, Table>) {
          for (const auto& v : d.values) {
            if (!v.is_exact()) return false;
          }
          return true;
        } else {
          return d.R.is_exact() && d.base->has_exact();
        }
      },
      data_);
}

std::optional<int> ParameterFunction::max_index() const {
  if (const auto* t = std::get_if<Table>(&data_)) return static_cast<int>(t->values.size());
  if (const auto* r = std::get_if<Rescaled>(&data_)) return r->base->max_index();
  return std::nullopt;
}

void ParameterFunction::check_index(int j) const {
  if (j < 1) throw Error(ErrorCode::out_of_range, "parameter index must be >= 1, got " + std::to_string(j));
  if (auto limit = max_index(); limit && j > *limit) {
    throw Error(ErrorCode::out_of_range, "index " + std::to_string(j) +
                                             " exceeds table length " + std::to_string(*limit));
  }
}

double ParameterFunction::a(int j) const {
  check_index(j);
  return std::visit(
      [j](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return std::pow(static_cast<double>(j), d.p.value() - 1.0);
        } else if constexpr (std::is_same_v<T, Ewens>) {
          return d.beta.value() / j;
        } else if constexpr (std::is_same_v<T, Table>) {
          return d.values[j - 1].value();
        } else {
          return std::pow(d.R.value(), j) * d.base->a(j);
        }
      },
      data_);
}

double ParameterFunction::log_a(int j) const {
  check_index(j);
  return std::visit(
      [j](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return (d.p.value() - 1.0) * std::log(static_cast<double>(j));
        } else if constexpr (std::is_same_v<T, Ewens>) {
          return std::log(d.beta.value()) - std::log(static_cast<double>(j));
        } else if constexpr (std::is_same_v<T, Table>) {
          return std::log(d.values[j - 1].value());
        } else {
          return j * std::log(d.R.value()) + d.base->log_a(j);
        }
      },
      data_);
}

Float ParameterFunction::a_float(int j) const {
  check_index(j);
  ensure_wide_exponent_range();
  return std::visit(
      [j](const auto& d) -> Float {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          if (d.p.is_integer()) {
            return Float(BigInt(boost::multiprecision::pow(BigInt(j), static_cast<unsigned>(d.p.value()) - 1)));
          }
          Float exponent = d.p.to_float() - 1;
          return exp(exponent * log(Float(j)));
        } else if constexpr (std::is_same_v<T, Ewens>) {
          return d.beta.to_float() / j;
        } else if constexpr (std::is_same_v<T, Table>) {
          return d.values[j - 1].to_float();
        } else {
          return Float(pow(d.R.to_float(), j) * d.base->a_float(j));
        }
      },
      data_);
}

Rational ParameterFunction::a_exact(int j) const {
  check_index(j);
  if (!has_exact()) {
    throw Error(ErrorCode::no_exact_channel, describe() + " has no exact rational channel");
  }
  return std::visit(
      [j](const auto& d) -> Rational {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return Rational(boost::multiprecision::pow(BigInt(j), static_cast<unsigned>(d.p.value()) - 1));
        } else if constexpr (std::is_same_v<T, Ewens>) {
          return d.beta.exact() / j;
        } else if constexpr (std::is_same_v<T, Table>) {
          return d.values[j - 1].exact();
        } else {
          Rational scale = 1;
          for (int i = 0; i < j; ++i) scale *= d.R.exact();
          return scale * d.base->a_exact(j);
        }
      },
      data_);
}

std::optional<double> ParameterFunction::power_law_exponent() const {
  if (const auto* p = std::get_if<PowerLaw>(&data_)) return p->p.value();
  if (const auto* r = std::get_if<Rescaled>(&data_)) return r->base->power_law_exponent();
  return std::nullopt;
}

double ParameterFunction::total_scale() const {
  if (const auto* r = std::get_if<Rescaled>(&data_)) return r->R.value() * r->base->total_scale();
  return 1.0;
}

ParameterFunction ParameterFunction::with_declared_family(double p1, double p2) const {
  if (!(p1 > 0.0) || !(p1 <= p2)) {
    throw Error(ErrorCode::invalid_argument, "declared family needs 0 < p1 <= p2");
  }
  ParameterFunction g = *this;
  g.declared_ = FamilyBounds{p1, p2};
  return g;
}

std::string ParameterFunction::describe() const {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return "powerlaw(p=" + d.p.to_string() + ")";
        } else if constexpr (std::is_same_v<T, Ewens>) {
          return "ewens(beta=" + d.beta.to_string() + ")";
        } else if constexpr (std::is_same_v<T, Table>) {
          return "table(" + std::to_string(d.values.size()) + " entries)";
        } else {
          return "rescaled(" + d.base->describe() + ", R=" + d.R.to_string() + ")";
        }
      },
      data_);
}

std::map<std::string, std::string> ParameterFunction::to_key_values() const {
  std::map<std::string, std::string> kv;
  std::visit(
      [&kv](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          kv["family"] = "powerlaw";
          kv["p"] = d.p.to_string();
        } else if constexpr (std::is_same_v<T, Ewens>) {
          kv["family"] = "ewens";
          kv["beta"] = d.beta.to_string();
        } else if constexpr (std::is_same_v<T, Table>) {
          kv["family"] = "table";
          std::string list = "[";
          for (std::size_t i = 0; i < d.values.size(); ++i) {
            if (i) list += ", ";
            list += d.values[i].to_string();
          }
          kv["table"] = list + "]";
        } else {
          kv = d.base->to_key_values();
          kv["base"] = kv["family"];
          kv["family"] = "rescaled";
          kv["R"] = d.R.to_string();
        }
      },
      data_);
  return kv;
}

ParameterFunction ParameterFunction::from_key_values(const std::map<std::string, std::string>& kv) {
  auto get = [&kv](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) return std::nullopt;
    return unquote(it->second);
  };
  auto need = [&](const std::string& key, const std::string& family) {
    auto v = get(key);
    if (!v) throw Error(ErrorCode::invalid_argument, "family '" + family + "' requires '" + key + "'");
    return *v;
  };
  auto build = [&](const std::string& family) -> ParameterFunction {
    if (family == "powerlaw" || family == "power_law") return power_law(Number::parse(need("p", family)));
    if (family == "ewens") return ewens(Number::parse(need("beta", family)));
    if (family == "table") return table(parse_number_list(need("table", family)));
    throw Error(ErrorCode::invalid_argument, "unknown family '" + family + "'");
  };

  auto family = get("family");
  if (!family) throw Error(ErrorCode::invalid_argument, "missing 'family'");
  ParameterFunction f = [&] {
    if (*family == "rescaled") {
      return rescale(build(need("base", *family)), Number::parse(need("R", *family)));
    }
    return build(*family);
  }();
  auto p1 = get("p1");
  auto p2 = get("p2");
  if (p1 || p2) {
    if (!p1 || !p2) throw Error(ErrorCode::invalid_argument, "declared family needs both p1 and p2");
    f = f.with_declared_family(Number::parse(*p1).value(), Number::parse(*p2).value());
  }
  return f;
}

AValue eval_a(const ParameterFunction& f, int j) {
  AValue out;
  out.value = f.a(j);
  if (f.has_exact()) out.exact = f.a_exact(j);
  return out;
}

std::vector<Number> parse_number_list(const std::string& text) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '[') body.erase(body.begin());
  if (!body.empty() && body.back() == ']') body.pop_back();
  std::vector<Number> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(item);
    if (item.empty()) continue;
    out.push_back(Number::parse(item));
  }
  return out;
}

std::map<std::string, std::string> parse_key_value_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;  // blank or section header
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::invalid_argument, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = unquote(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> load_key_value_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_value_config(buf.str());
}

}  // namespace cfp
