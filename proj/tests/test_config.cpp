#include "metapop/config.hpp"
#include "metapop/errors.hpp"
#include "test_support.hpp"

using namespace metapop;

namespace {

const char* kArrays = R"({
  "topology": "EX6",
  "r": [1.2, 0.9, 0.8],
  "k": [2, 1.5, 3],
  "m": [[0, 0.3, 0.4], [0, 0, 0], [0, 0.2, 0]],
  "seed": 7,
  "sweep": {"param": "r2", "lo": 0.1, "hi": 1.0, "steps": 10}
})";

const char* kNamed = R"({
  "topology": "EX6", "seed": 7,
  "r1": 1.2, "r2": 0.9, "r3": 0.8, "k1": 2, "k2": 1.5, "k3": 3,
  "m12": 0.3, "m13": 0.4, "m21": 0, "m23": 0, "m31": 0, "m32": 0.2,
  "sweep": {"param": "r2", "lo": 0.1, "hi": 1.0, "steps": 10}
})";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("array and named forms parse to the same configuration") {
  const auto a = parse_config(kArrays);
  const auto b = parse_config(kNamed);
  CHECK(a.params == b.params);
  CHECK(a.topology == TopologyId::Ex6);
  CHECK(a.seed == 7);
  REQUIRE(a.sweep.has_value());
  CHECK(a.sweep->param == ParamId::R2);
  CHECK(a.sweep->steps == 10);
  CHECK(serialize_config(a) == serialize_config(b));
}

TEST_CASE("canonical serialization round-trips byte for byte") {
  const auto a = parse_config(kNamed);
  const std::string once = serialize_config(a);
  const auto b = parse_config(once);
  CHECK(b.params == a.params);
  CHECK(serialize_config(b) == once);

  RunConfig c = a;
  c.params = c.params.with(ParamId::M12, 0.1 + 0.2);  // not exactly representable in short decimal
  CHECK(parse_config(serialize_config(c)).params == c.params);
}

TEST_CASE("missing fields are named") {
  const std::string msg = error_of(R"({"r": [1,1,1], "k1": 1, "k3": 1, "m": [[0,0,0],[0,0,0],[0,0,0]]})");
  CHECK(msg.find("\"k2\"") != std::string::npos);
  CHECK(error_of(R"({"r": [1,1,1], "k": [1,1,1]})").find("\"m12\"") != std::string::npos);
}

TEST_CASE("syntax errors carry line and column") {
  const std::string msg = error_of("{\n  \"r\": [1, 1, 1],\n  \"k\": [1, 1 1]\n}");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("every invariant violation is listed") {
  try {
    parse_config(R"({"r": [-1, 1, 1], "k": [1, 0, 1], "m": [[0, -0.5, 0], [0, 0, 0], [0, 0, 0]]})");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.violations().size() == 3);
  }
}

TEST_CASE("bad tokens and shapes") {
  CHECK(error_of(R"({"r": [1,1,1], "k": [1,1,1], "m": [[0,0,0],[0,0,0],[0,0,0]], "topology": "EX9"})")
            .find("EX9") != std::string::npos);
  CHECK(error_of(R"({"r": [1,1], "k": [1,1,1], "m": [[0,0,0],[0,0,0],[0,0,0]]})").find("\"r\"") != std::string::npos);
  CHECK(error_of(R"({"r": [1,1,1], "k": [1,1,1], "m": [[0,0,0],[0,0,0],[0,0,0]], "sweep": {"param": "q"}})")
            .find("sweep.param") != std::string::npos);
  CHECK(error_of("[1, 2]").find("object") != std::string::npos);
}
