/*
 * Copyright 2026 The Fairgrid Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairgrid/nn/serialize.h"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fmt/format.h"
#include "fmt/ostream.h"

namespace fairgrid::nn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void write_param(std::ostream& out, const char* name, const std::vector<double>& v) {
  fmt::print(out, "param {} {}", name, v.size());
  for (double x : v) fmt::print(out, " {:.17g}", x);
  out << '\n';
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::runtime_error(fmt::format("model file line {}: {}", line, what));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-empty line split into tokens.
  std::vector<std::string> next() {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      std::istringstream ss(text);
      std::vector<std::string> tokens;
      for (std::string t; ss >> t;) tokens.push_back(t);
      if (!tokens.empty()) return tokens;
    }
    fail(line_, "unexpected end of file");
  }

  std::vector<std::string> expect(const std::string& keyword, std::size_t min_tokens) {
    auto t = next();
    if (t[0] != keyword || t.size() < min_tokens) {
      fail(line_, fmt::format("expected '{}'", keyword));
    }
    return t;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::uint64_t to_u64(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    fail(line, fmt::format("'{}' is not an unsigned integer", s));
  }
}

double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    fail(line, fmt::format("'{}' is not a number", s));
  }
}

std::map<std::string, std::string> attributes(const std::vector<std::string>& tokens,
                                              std::size_t line) {
  std::map<std::string, std::string> attrs;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos) fail(line, fmt::format("bad attribute '{}'", tokens[i]));
    attrs[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
  }
  return attrs;
}

std::vector<double> read_param(Reader& r, const std::string& name, std::size_t expected) {
  auto t = r.expect("param", 3);
  if (t[1] != name) fail(r.line(), fmt::format("expected parameter '{}', got '{}'", name, t[1]));
  const std::size_t n = to_u64(t[2], r.line());
  if (n != expected || t.size() != n + 3) {
    fail(r.line(), fmt::format("parameter '{}' should have {} values", name, expected));
  }
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = to_double(t[i + 3], r.line());
  return v;
}

}  // namespace

void save_model(const ModelFile& file, std::ostream& out) {
  const Model& m = file.model;
  fmt::print(out, "fairgrid-model {}\n", kModelFormatVersion);
  fmt::print(out, "input {} {} {}\n", m.input_shape().c, m.input_shape().h, m.input_shape().w);
  fmt::print(out, "seed {}\n", file.seed);
  for (const auto& [k, v] : file.config) fmt::print(out, "config {} {}\n", k, v);
  fmt::print(out, "layers {}\n", m.layers().size());
  for (const Layer& layer : m.layers()) {
    std::visit(
        Overloaded{
            [&](const Conv& c) {
              fmt::print(out, "layer conv in={} out={} kh={} kw={} stride={} cross_correlation={}\n",
                         c.in_channels, c.out_channels, c.kernel_h, c.kernel_w, c.stride,
                         c.cross_correlation ? 1 : 0);
              write_param(out, "kernel", c.kernel);
              write_param(out, "bias", c.bias);
            },
            [&](const Relu&) { out << "layer relu\n"; },
            [&](const MaxPool& p) {
              fmt::print(out, "layer maxpool window={} stride={}\n", p.window, p.stride);
            },
            [&](const Flatten&) { out << "layer flatten\n"; },
            [&](const Dense& d) {
              fmt::print(out, "layer dense in={} out={}\n", d.in, d.out);
              write_param(out, "weight", d.weight);
              write_param(out, "bias", d.bias);
            },
            [&](const Dropout& d) { fmt::print(out, "layer dropout rate={:.17g}\n", d.rate); },
            [&](const BatchNorm& bn) {
              fmt::print(out, "layer batchnorm channels={} epsilon={:.17g} momentum={:.17g}\n",
                         bn.channels, bn.epsilon, bn.momentum);
              write_param(out, "gamma", bn.gamma);
              write_param(out, "beta", bn.beta);
              write_param(out, "running_mean", bn.running_mean);
              write_param(out, "running_var", bn.running_var);
            },
            [&](const Sigmoid&) { out << "layer sigmoid\n"; }},
        layer);
  }
  out << "end\n";
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_model(file, out);
  if (!out) throw std::runtime_error("error writing " + path.string());
}

ModelFile load_model(std::istream& in) {
  Reader r(in);
  auto header = r.next();
  if (header.size() != 2 || header[0] != "fairgrid-model") {
    fail(r.line(), "not a fairgrid model file");
  }
  if (to_u64(header[1], r.line()) != static_cast<std::uint64_t>(kModelFormatVersion)) {
    fail(r.line(), fmt::format("unsupported model format version {} (expected {})",
                               header[1], kModelFormatVersion));
  }
  auto in_tokens = r.expect("input", 4);
  const Shape input{to_u64(in_tokens[1], r.line()), to_u64(in_tokens[2], r.line()),
                    to_u64(in_tokens[3], r.line())};
  ModelFile file;
  file.seed = to_u64(r.expect("seed", 2)[1], r.line());
  auto t = r.next();
  while (t[0] == "config") {
    if (t.size() != 3) fail(r.line(), "config lines need a key and a value");
    file.config.emplace_back(t[1], t[2]);
    t = r.next();
  }
  if (t[0] != "layers" || t.size() != 2) fail(r.line(), "expected 'layers'");
  const std::size_t count = to_u64(t[1], r.line());

  std::vector<Layer> layers;
  for (std::size_t i = 0; i < count; ++i) {
    auto lt = r.expect("layer", 2);
    const std::size_t line = r.line();
    auto attrs = attributes(lt, line);
    auto uint_attr = [&](const char* key) {
      auto it = attrs.find(key);
      if (it == attrs.end()) fail(line, fmt::format("missing attribute '{}'", key));
      return static_cast<std::size_t>(to_u64(it->second, line));
    };
    auto real_attr = [&](const char* key) {
      auto it = attrs.find(key);
      if (it == attrs.end()) fail(line, fmt::format("missing attribute '{}'", key));
      return to_double(it->second, line);
    };
    const std::string& kind = lt[1];
    if (kind == "conv") {
      Conv c = make_conv(uint_attr("in"), uint_attr("out"), uint_attr("kh"), uint_attr("kw"),
                         uint_attr("stride"));
      c.cross_correlation = uint_attr("cross_correlation") != 0;
      c.kernel = read_param(r, "kernel", c.kernel.size());
      c.bias = read_param(r, "bias", c.bias.size());
      layers.emplace_back(std::move(c));
    } else if (kind == "relu") {
      layers.emplace_back(Relu{});
    } else if (kind == "maxpool") {
      layers.emplace_back(MaxPool{uint_attr("window"), uint_attr("stride")});
    } else if (kind == "flatten") {
      layers.emplace_back(Flatten{});
    } else if (kind == "dense") {
      Dense d = make_dense(uint_attr("in"), uint_attr("out"));
      d.weight = read_param(r, "weight", d.weight.size());
      d.bias = read_param(r, "bias", d.bias.size());
      layers.emplace_back(std::move(d));
    } else if (kind == "dropout") {
      layers.emplace_back(Dropout{real_attr("rate")});
    } else if (kind == "batchnorm") {
      BatchNorm bn = make_batchnorm(uint_attr("channels"));
      bn.epsilon = real_attr("epsilon");
      bn.momentum = real_attr("momentum");
      bn.gamma = read_param(r, "gamma", bn.channels);
      bn.beta = read_param(r, "beta", bn.channels);
      bn.running_mean = read_param(r, "running_mean", bn.channels);
      bn.running_var = read_param(r, "running_var", bn.channels);
      layers.emplace_back(std::move(bn));
    } else if (kind == "sigmoid") {
      layers.emplace_back(Sigmoid{});
    } else {
      fail(line, fmt::format("unknown layer kind '{}'", kind));
    }
  }
  r.expect("end", 1);
  try {
    file.model = Model(input, std::move(layers));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(fmt::format("model file has incompatible shapes: {}", e.what()));
  }
  return file;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read model file " + path.string());
  return load_model(in);
}

}  // namespace fairgrid::nn
