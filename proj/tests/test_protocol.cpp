#include <gtest/gtest.h>

#include "hapticopter/gateway/protocol.hpp"

using namespace hapticopter;
using namespace hapticopter::gateway;

TEST(Envelope, RoundTrip) {
  const WireMessage m{MessageKind::HandInput, 42, 1.25, {{"position", {0.1, 0.2, 0.3}}}};
  EXPECT_EQ(parse_message(serialize(m)), m);
  for (auto k : kMessageKinds) {
    const WireMessage e{k, 1, 0.0, json::object()};
    EXPECT_EQ(parse_message(serialize(e)), e);
  }
}

TEST(Envelope, PayloadIsOptional) {
  const auto m = parse_message(R"({"kind":"ResetGoal","seq":3,"t":0.5})");
  EXPECT_EQ(m.kind, MessageKind::ResetGoal);
  EXPECT_TRUE(m.payload.empty());
}

TEST(Envelope, Rejections) {
  EXPECT_THROW(parse_message("{"), ProtocolError);
  EXPECT_THROW(parse_message("[1,2]"), ProtocolError);
  EXPECT_THROW(parse_message(R"({"kind":"Teleport","seq":1,"t":0})"), ProtocolError);
  EXPECT_THROW(parse_message(R"({"kind":"Hello","seq":1.5,"t":0})"), ProtocolError);
  EXPECT_THROW(parse_message(R"({"kind":"Hello","seq":1})"), ProtocolError);
  EXPECT_THROW(parse_message(R"({"kind":"Hello","seq":1,"t":0,"payload":[]})"), ProtocolError);
  EXPECT_THROW(parse_message(R"({"kind":"Hello","seq":1,"t":0,"extra":1})"), ProtocolError);
}

TEST(Envelope, InboundKinds) {
  EXPECT_TRUE(is_inbound(MessageKind::HandInput));
  EXPECT_TRUE(is_inbound(MessageKind::ClutchInput));
  EXPECT_FALSE(is_inbound(MessageKind::StateUpdate));
  EXPECT_FALSE(is_inbound(MessageKind::Error));
}

TEST(Payload, Helpers) {
  const json p{{"position", {1, 2, 3}}, {"engaged", true}};
  EXPECT_EQ(payload_vec(p, "position"), (Vec3{1, 2, 3}));
  EXPECT_TRUE(payload_bool(p, "engaged"));
  EXPECT_THROW(payload_vec(p, "engaged"), ProtocolError);
  EXPECT_THROW(payload_vec(json{{"position", {1, 2}}}, "position"), ProtocolError);
  EXPECT_THROW(payload_bool(json{{"engaged", 1}}, "engaged"), ProtocolError);
  EXPECT_THROW(payload_only(p, {"position"}), ProtocolError);
}
