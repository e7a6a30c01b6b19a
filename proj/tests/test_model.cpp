#include <doctest.h>

#include "helpers.hpp"
#include "qos/model.hpp"

using namespace qos;
using namespace qos::test;

namespace {

bool rejects_with(const ScenarioSpec& spec, ErrorKind kind) {
  try {
    validate_scenario(spec);
  } catch (const ValidationError& e) {
    return e.has(kind);
  }
  return false;
}

ScenarioSpec two_flows(double a1, double a2, PolicyKind policy = PolicyKind::kPiHat) {
  return make_spec({bursty_flow(1, a1, 1, 10, 300), bursty_flow(2, a2, 1, 40, 300)}, policy);
}

}  // namespace

TEST_CASE("validate_scenario accepts a fully subscribed pair") {
  CHECK(check_scenario(two_flows(0.2, 0.8)).empty());
}

TEST_CASE("validate_scenario rejects oversubscription") {
  CHECK(rejects_with(two_flows(0.6, 0.6), ErrorKind::kAdmissionViolation));
}

TEST_CASE("pi_bar needs a drop cap covering A^max") {
  auto spec = make_spec({bursty_flow(1, 0.2, 1, 10, 300)}, PolicyKind::kPiBar);
  spec.flows[0].a_max = 300;
  spec.flows[0].drop_cap = 299;
  CHECK(rejects_with(spec, ErrorKind::kMissingDropCap));
  spec.flows[0].drop_cap = 300;
  CHECK(check_scenario(spec).empty());
  spec.flows[0].drop_cap.reset();
  CHECK(rejects_with(spec, ErrorKind::kMissingDropCap));
}

TEST_CASE("pi_bar drop cap must also cover ceil(alpha S^max)") {
  auto spec = make_spec({bursty_flow(1, 0.25, 1, 1, 5)}, PolicyKind::kPiBar);
  spec.flows[0].drop_cap = 12;  // ceil(12.5) = 13
  CHECK(rejects_with(spec, ErrorKind::kMissingDropCap));
  spec.flows[0].drop_cap = 13;
  CHECK(check_scenario(spec).empty());
}

TEST_CASE("pi_bar with a closed-loop source is refused") {
  auto spec = make_spec({aimd_flow(1, 0.5)}, PolicyKind::kPiBar);
  spec.flows[0].drop_cap = 100;
  CHECK(rejects_with(spec, ErrorKind::kMissingDropCap));
}

TEST_CASE("parameter ranges") {
  auto spec = two_flows(0.2, 0.3);
  SUBCASE("zeta") {
    spec.flows[0].zeta = 0.0;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("alpha") {
    spec.flows[0].alpha = -0.1;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("horizon") {
    spec.horizon = 0;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("weight") {
    spec.flows[1].weight = 1.5;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("negative V") {
    spec.flows[1].v_param = -1;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("join beyond horizon") {
    spec.flows[1].join_slot = spec.horizon + 1;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("leave before join") {
    spec.flows[1].join_slot = 10;
    spec.flows[1].leave_slot = 10;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("duplicate ids") {
    spec.flows[1].id = spec.flows[0].id;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("a_max below eta*nu") {
    spec.flows[0].a_max = 10;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("channel bounds") {
    spec.channel.kind = ChannelKind::kSequence;
    spec.channel.s_min = 10;
    spec.channel.values = {10, 60};
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
  SUBCASE("constant channel with a range") {
    spec.channel.s_min = 20;
    CHECK(rejects_with(spec, ErrorKind::kInvalidParameter));
  }
}

TEST_CASE("admission is checked only over concurrently present flows") {
  auto spec = two_flows(0.6, 0.6);
  spec.flows[0].leave_slot = 500;
  spec.flows[1].join_slot = 500;
  CHECK(check_scenario(spec).empty());
  spec.flows[1].join_slot = 499;
  CHECK(rejects_with(spec, ErrorKind::kAdmissionViolation));
}

TEST_CASE("validation reports every issue at once") {
  auto spec = two_flows(0.6, 0.6);
  spec.flows[0].zeta = -1;
  try {
    validate_scenario(spec);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(e.has(ErrorKind::kAdmissionViolation));
    CHECK(e.has(ErrorKind::kInvalidParameter));
    CHECK(e.issues().size() >= 2);
  }
}

TEST_CASE("validate_scenario is idempotent") {
  const auto spec = two_flows(0.2, 0.8);
  const auto once = validate_scenario(spec);
  const auto twice = validate_scenario(once);
  REQUIRE(twice.flows.size() == spec.flows.size());
  for (std::size_t i = 0; i < spec.flows.size(); ++i) {
    CHECK(twice.flows[i].alpha == spec.flows[i].alpha);
    CHECK(twice.flows[i].a_max == spec.flows[i].a_max);
    CHECK(twice.flows[i].drop_cap == spec.flows[i].drop_cap);
  }
  CHECK(twice.horizon == spec.horizon);
}

TEST_CASE("bursty A^max is derived as eta * nu") {
  const auto f = bursty_flow(1, 0.2, 10, 1, 30);
  CHECK(f.effective_a_max() == 300);
  CHECK_FALSE(aimd_flow(2, 0.1).effective_a_max().has_value());
}

TEST_CASE("service shares snap rounding noise") {
  CHECK(ceil_share(0.7, 10) == 7);
  CHECK(floor_share(0.7, 10) == 7);
  CHECK(ceil_share(0.25, 50) == 13);
  CHECK(floor_share(0.25, 50) == 12);
  CHECK(service_share(0.2, 50) == 10.0);
}

TEST_CASE("enum names round trip") {
  for (auto p : {PolicyKind::kPiBar, PolicyKind::kPiHat, PolicyKind::kPiStatic}) {
    CHECK(parse_policy(to_string(p)) == p);
  }
  CHECK(parse_policy("pi_hat") == PolicyKind::kPiHat);
  CHECK_FALSE(parse_policy("pi_star").has_value());
  CHECK(parse_drop_discipline("tail") == DropDiscipline::kTail);
  CHECK(parse_nack_mode("packet") == NackMode::kPerPacket);
  CHECK(parse_channel_kind("seeded-random") == ChannelKind::kSeededRandom);
}

TEST_CASE("flow presence interval") {
  FlowConfig f;
  f.join_slot = 10;
  f.leave_slot = 20;
  CHECK_FALSE(f.present_at(9));
  CHECK(f.present_at(10));
  CHECK(f.present_at(19));
  CHECK_FALSE(f.present_at(20));
}
