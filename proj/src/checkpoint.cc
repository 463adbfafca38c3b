// Copyright 2026 The Pairrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <sstream>

#include "pairrank/errors.h"
#include "pairrank/text_format.h"
#include "pairrank/training.h"

namespace pairrank {
namespace {

constexpr std::size_t kValuesPerLine = 8;

std::string JoinDoubles(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += FormatDouble(values[i]);
  }
  return out;
}

std::vector<double> ParseDoubleList(const std::string& text,
                                    const std::string& context) {
  std::vector<double> out;
  if (Trim(text).empty()) return out;
  for (const std::string& part : Split(text, ',')) {
    out.push_back(ParseDouble(Trim(part), context));
  }
  return out;
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  // Next non-empty line, or false at end of input.
  bool Next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!Trim(line).empty()) return true;
    }
    return false;
  }

  std::string Where() const {
    return source_ + ":" + std::to_string(line_no_);
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw DataError(Where() + ": " + what);
  }

  std::pair<std::string, std::string> KeyValue(const std::string& line) const {
    const auto eq = line.find('=');
    if (eq == std::string::npos) Fail("expected 'key = value'");
    return {std::string(Trim(std::string_view(line).substr(0, eq))),
            std::string(Trim(std::string_view(line).substr(eq + 1)))};
  }

  // Reads the next line and requires it to be `key = value`.
  std::string Expect(const std::string& key) {
    std::string line;
    if (!Next(line)) Fail("unexpected end of input, expected '" + key + "'");
    auto [k, v] = KeyValue(line);
    if (k != key) Fail("expected '" + key + "', got '" + k + "'");
    return v;
  }

  void ExpectSection(const std::string& name) {
    std::string line;
    if (!Next(line) || Trim(line) != "[" + name + "]") {
      Fail("expected section [" + name + "]");
    }
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 1;  // the pragma line was consumed already
};

}  // namespace

void WriteCheckpoint(std::ostream& out, const Checkpoint& ckpt) {
  const Model& model = ckpt.model;
  const HeadShape& shape = model.head.shape();
  out << kCheckpointPragma << "\n[config]\n";
  WriteConfig(out, ckpt.config);
  out << "[model]\n";
  out << "variant = " << VariantName(model.variant) << "\n";
  out << "input_dim = " << shape.input_dim << "\n";
  out << "hidden = ";
  for (std::size_t i = 0; i < shape.hidden.size(); ++i) {
    out << (i > 0 ? "," : "") << shape.hidden[i];
  }
  out << "\n";
  out << "sigma_floor = " << FormatDouble(model.head.sigma_floor()) << "\n";
  out << "p_floor = " << FormatDouble(model.p_floor) << "\n";
  const std::span<const double> params = model.head.params();
  out << "head_params = " << params.size() << "\n";
  for (std::size_t i = 0; i < params.size(); ++i) {
    out << FormatDouble(params[i]);
    out << ((i + 1) % kValuesPerLine == 0 || i + 1 == params.size() ? "\n"
                                                                     : " ");
  }
  out << "boundary_mode = " << BoundaryModeName(model.bounds.mode()) << "\n";
  out << "boundary_labels = " << model.bounds.num_labels() << "\n";
  out << "boundary_raw = " << JoinDoubles(model.bounds.raw()) << "\n";
  out << "judges = " << model.judges.size() << "\n";
  for (std::size_t j = 0; j < model.judges.size(); ++j) {
    out << "judge " << model.judges.id(j) << " "
        << FormatDouble(model.judges.log_gamma(j)) << "\n";
  }
  out << "[meta]\n";
  out << "epochs = " << ckpt.epochs_run << "\n";
  out << "loss_history = " << JoinDoubles(ckpt.loss_history) << "\n";
}

std::string SerializeCheckpoint(const Checkpoint& checkpoint) {
  std::ostringstream out;
  WriteCheckpoint(out, checkpoint);
  return out.str();
}

Checkpoint ParseCheckpoint(std::istream& in, const std::string& source) {
  ExpectPragma(in, kCheckpointPragma, source);
  LineReader reader(in, source);
  Checkpoint ckpt;
  try {
    reader.ExpectSection("config");
    std::string line;
    for (;;) {
      if (!reader.Next(line)) reader.Fail("missing section [model]");
      if (Trim(line) == "[model]") break;
      auto [key, value] = reader.KeyValue(line);
      try {
        SetConfigValue(ckpt.config, key, value);
      } catch (const ConfigError& e) {
        reader.Fail(e.what());
      }
    }

    Model& model = ckpt.model;
    model.variant = ParseVariant(reader.Expect("variant"));
    HeadShape shape;
    shape.input_dim = static_cast<std::size_t>(
        ParseInt(reader.Expect("input_dim"), reader.Where()));
    for (const std::string& part : Split(reader.Expect("hidden"), ',')) {
      shape.hidden.push_back(
          static_cast<std::size_t>(ParseInt(Trim(part), reader.Where())));
    }
    const double sigma_floor =
        ParseDouble(reader.Expect("sigma_floor"), reader.Where());
    model.p_floor = ParseDouble(reader.Expect("p_floor"), reader.Where());
    model.head = RankHead(shape, sigma_floor);
    const std::int64_t count =
        ParseInt(reader.Expect("head_params"), reader.Where());
    std::span<double> params = model.head.params();
    if (count < 0 || static_cast<std::size_t>(count) != params.size()) {
      reader.Fail("head_params = " + std::to_string(count) +
                  " does not match the declared shape (" +
                  std::to_string(params.size()) + ")");
    }
    std::size_t filled = 0;
    while (filled < params.size()) {
      if (!reader.Next(line)) reader.Fail("truncated head parameters");
      for (const std::string& token : SplitWhitespace(line)) {
        if (filled == params.size()) reader.Fail("too many head parameters");
        params[filled++] = ParseDouble(token, reader.Where());
      }
    }

    const BoundaryMode mode = ParseBoundaryMode(reader.Expect("boundary_mode"));
    const int labels = static_cast<int>(
        ParseInt(reader.Expect("boundary_labels"), reader.Where()));
    if (labels != NumLabels(model.variant)) {
      reader.Fail("boundary_labels does not match variant " +
                  VariantName(model.variant));
    }
    std::vector<double> raw =
        ParseDoubleList(reader.Expect("boundary_raw"), reader.Where());
    model.bounds = BoundarySet::FromRaw(labels, mode, std::move(raw));

    const std::int64_t judges =
        ParseInt(reader.Expect("judges"), reader.Where());
    for (std::int64_t j = 0; j < judges; ++j) {
      if (!reader.Next(line)) reader.Fail("truncated judge table");
      const std::vector<std::string> parts = SplitWhitespace(line);
      if (parts.size() != 3 || parts[0] != "judge") {
        reader.Fail("expected 'judge <id> <log_gamma>'");
      }
      CheckId(parts[1], reader.Where());
      if (model.judges.Find(parts[1])) reader.Fail("duplicate judge " + parts[1]);
      model.judges.Add(parts[1], ParseDouble(parts[2], reader.Where()));
    }

    reader.ExpectSection("meta");
    ckpt.epochs_run =
        static_cast<int>(ParseInt(reader.Expect("epochs"), reader.Where()));
    ckpt.loss_history =
        ParseDoubleList(reader.Expect("loss_history"), reader.Where());
    if (reader.Next(line)) reader.Fail("unexpected trailing content");
  } catch (const ConfigError& e) {
    throw DataError(reader.Where() + ": " + e.what());
  } catch (const InvariantError& e) {
    throw DataError(reader.Where() + ": " + e.what());
  }
  return ckpt;
}

Checkpoint ReadCheckpointFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ParseCheckpoint(in, path);
}

void WriteCheckpointFile(const std::string& path, const Checkpoint& checkpoint) {
  WriteFile(path, SerializeCheckpoint(checkpoint));
}

}  // namespace pairrank
