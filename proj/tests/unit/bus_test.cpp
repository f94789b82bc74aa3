// Copyright 2026 The Sociobot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <atomic>
#include <map>
#include <random>
#include <thread>

#include <boost/asio.hpp>
#include <gtest/gtest.h>

#include "random_json.hpp"
#include "sociobot/bus/broker.hpp"
#include "sociobot/bus/envelope.hpp"
#include "sociobot/bus/tcp.hpp"

namespace sociobot::bus {
namespace {

using namespace std::chrono_literals;
using nlohmann::json;

Envelope make(std::string topic, json payload = json::object(), std::string type = "Test") {
  Envelope env;
  env.topic = std::move(topic);
  env.type = std::move(type);
  env.payload = std::move(payload);
  return env;
}

BusErrc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const BusError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected BusError";
  return BusErrc::kConnection;
}

TEST(Topic, Grammar) {
  for (const char* ok : {"/clock", "/joint/state", "/a/b_c/d9", "/meta/hello"}) {
    EXPECT_TRUE(valid_topic(ok)) << ok;
  }
  for (const char* bad : {"", "/", "clock", "/Clock", "/a//b", "/a/", "/a b", "/a-b", "/a/*"}) {
    EXPECT_FALSE(valid_topic(bad)) << bad;
  }
  EXPECT_TRUE(valid_pattern("/*"));
  EXPECT_TRUE(valid_pattern("/camera/*"));
  EXPECT_TRUE(valid_pattern("/camera/image"));
  EXPECT_FALSE(valid_pattern("/camera*"));
  EXPECT_FALSE(valid_pattern("*"));
  EXPECT_TRUE(pattern_matches("/camera/*", "/camera/image"));
  EXPECT_TRUE(pattern_matches("/camera/*", "/camera/a/b"));
  EXPECT_FALSE(pattern_matches("/camera/*", "/camera"));
  EXPECT_FALSE(pattern_matches("/camera/*", "/cameras/x"));
  EXPECT_TRUE(pattern_matches("/*", "/x"));
  EXPECT_FALSE(pattern_matches("/joint/state", "/joint/target"));
}

TEST(Codec, ClockEnvelopeRoundTrips) {
  Envelope env = make("/clock", json::object(), "Clock");
  env.seq = 1;
  env.stamp = 0.0;
  const std::string frame = encode_frame(env);
  const std::string body = frame.substr(4);
  EXPECT_EQ(body, R"({"payload":{},"seq":1,"stamp":0.0,"topic":"/clock","type":"Clock"})");
  EXPECT_EQ(static_cast<unsigned char>(frame[3]), body.size());
  EXPECT_EQ(frame[0], 0);
  EXPECT_EQ(decode_frame(frame), env);
}

TEST(Codec, BigEndianLengthPrefix) {
  const Envelope env = make("/x", {{"blob", std::string(70000, 'a')}});
  const std::string frame = encode_frame(env);
  const std::size_t n = frame.size() - 4;
  EXPECT_EQ(static_cast<unsigned char>(frame[0]), (n >> 24) & 0xff);
  EXPECT_EQ(static_cast<unsigned char>(frame[1]), (n >> 16) & 0xff);
  EXPECT_EQ(static_cast<unsigned char>(frame[2]), (n >> 8) & 0xff);
  EXPECT_EQ(static_cast<unsigned char>(frame[3]), n & 0xff);
}

TEST(Codec, SeventeenMebibyteBodyIsTooLarge) {
  const Envelope env = make("/big", {{"blob", std::string(17u << 20, 'x')}});
  EXPECT_EQ(error_of([&] { encode_frame(env); }), BusErrc::kFrameTooLarge);

  std::string header(4, '\0');
  const std::uint32_t n = 17u << 20;
  header[0] = static_cast<char>(n >> 24);
  header[1] = static_cast<char>(n >> 16);
  EXPECT_EQ(error_of([&] { decode_frame(header + std::string(n, ' ')); }), BusErrc::kFrameTooLarge);
  FrameDecoder decoder;
  decoder.feed(header);
  EXPECT_EQ(error_of([&] { decoder.next(); }), BusErrc::kFrameTooLarge);
}

TEST(Codec, RejectsBadInput) {
  EXPECT_EQ(error_of([&] { encode_frame(make("no_slash")); }), BusErrc::kBadTopic);
  EXPECT_EQ(error_of([&] { parse_envelope("{nope"); }), BusErrc::kBadJson);
  EXPECT_EQ(error_of([&] { parse_envelope("[]"); }), BusErrc::kBadJson);
  EXPECT_EQ(error_of([&] { parse_envelope(R"({"topic": "/A"})"); }), BusErrc::kBadTopic);
  EXPECT_EQ(error_of([&] { parse_envelope(R"({"topic": "/a", "seq": -1})"); }), BusErrc::kBadJson);
  EXPECT_EQ(error_of([&] { parse_envelope(R"({"topic": "/a", "stamp": "x"})"); }),
            BusErrc::kBadJson);
}

TEST(Codec, RandomEnvelopesRoundTripByteExact) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const Envelope env = testing::random_envelope(rng);
    const std::string frame = encode_frame(env);
    const Envelope back = decode_frame(frame);
    ASSERT_EQ(back, env) << frame;
    ASSERT_EQ(encode_frame(back), frame);
  }
}

TEST(Codec, ByteByByteStreamYieldsOriginalSequence) {
  std::mt19937_64 rng(77);
  std::vector<Envelope> sent;
  std::string stream;
  for (int i = 0; i < 200; ++i) {
    sent.push_back(testing::random_envelope(rng));
    stream += encode_frame(sent.back());
  }
  FrameDecoder decoder;
  std::vector<Envelope> got;
  for (char c : stream) {
    decoder.feed(std::string_view(&c, 1));
    while (auto env = decoder.next()) {
      got.push_back(*env);
    }
  }
  EXPECT_EQ(got, sent);
  EXPECT_EQ(decoder.buffered(), 0u);
}

TEST(Broker, PublishWithoutSubscribersIsAccepted) {
  Broker broker;
  EXPECT_EQ(broker.publish(make("/nobody")).seq, 1u);
  EXPECT_EQ(broker.publish(make("/nobody")).seq, 2u);
  EXPECT_EQ(broker.publish(make("/other")).seq, 1u);
}

TEST(Broker, TwoSubscribersSeeTheSameSeq) {
  Broker broker;
  auto a = broker.subscribe("/joint/state");
  auto b = broker.subscribe("/joint/*");
  Envelope env = make("/joint/state", {{"x", 1}});
  env.seq = 99;  // callers never choose seq
  broker.publish(env);
  const auto ea = a->try_pop();
  const auto eb = b->try_pop();
  ASSERT_TRUE(ea && eb);
  EXPECT_EQ(ea->seq, 1u);
  EXPECT_EQ(*ea, *eb);
}

TEST(Broker, OverflowKeepsNewest256InOrder) {
  Broker broker;
  auto sub = broker.subscribe("/fast");
  for (int i = 0; i < 300; ++i) {
    broker.publish(make("/fast", {{"i", i}}));
  }
  const auto got = sub->drain();
  ASSERT_EQ(got.size(), 256u);
  for (std::size_t k = 0; k < got.size(); ++k) {
    EXPECT_EQ(got[k].payload["i"], 44 + static_cast<int>(k));
    EXPECT_EQ(got[k].seq, 45 + k);
  }
  EXPECT_EQ(sub->dropped(), 44u);
}

TEST(Broker, NoCrossTalk) {
  Broker broker;
  auto sub = broker.subscribe("/camera/*");
  broker.add_pattern(sub, "/clock");
  broker.publish(make("/camera/image"));
  broker.publish(make("/cameras"));
  broker.publish(make("/clock"));
  broker.publish(make("/joint/state"));
  const auto got = sub->drain();
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].topic, "/camera/image");
  EXPECT_EQ(got[1].topic, "/clock");
  EXPECT_TRUE(broker.remove_pattern(sub, "/clock"));
  broker.publish(make("/clock"));
  EXPECT_EQ(sub->size(), 0u);
}

TEST(Broker, Errors) {
  Broker broker;
  EXPECT_EQ(error_of([&] { broker.publish(make("/Bad")); }), BusErrc::kBadTopic);
  EXPECT_EQ(error_of([&] { broker.subscribe("/a*"); }), BusErrc::kBadPattern);
}

TEST(Broker, TopicsIntrospection) {
  Broker broker;
  auto s1 = broker.subscribe("/joint/*");
  auto s2 = broker.subscribe("/joint/state");
  broker.publish(make("/joint/state", {}, "JointState"), "sim");
  broker.publish(make("/joint/state", {}, "JointState"), "replay");
  broker.publish(make("/clock", {}, "Clock"), "sim");
  const auto topics = broker.topics();
  ASSERT_EQ(topics.size(), 2u);
  EXPECT_EQ(topics[0].topic, "/clock");
  EXPECT_EQ(topics[0].subscribers, 0u);
  EXPECT_EQ(topics[1].type, "JointState");
  EXPECT_EQ(topics[1].publishers, 2u);
  EXPECT_EQ(topics[1].subscribers, 2u);
  broker.unsubscribe(s2);
  EXPECT_EQ(broker.topics()[1].subscribers, 1u);
}

TEST(Broker, ConcurrentPublishersKeepPerTopicOrder) {
  Broker broker;
  auto sub = broker.subscribe("/shared", 100000);
  constexpr int kPerThread = 2000;
  std::vector<std::thread> threads;
  for (int t = 0; t < 3; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < kPerThread; ++i) {
        broker.publish(make("/shared", {{"from", t}, {"i", i}}));
      }
    });
  }
  for (auto& th : threads) th.join();
  const auto got = sub->drain();
  ASSERT_EQ(got.size(), 3u * kPerThread);
  std::map<int, int> last{{0, -1}, {1, -1}, {2, -1}};
  for (std::size_t k = 0; k < got.size(); ++k) {
    EXPECT_EQ(got[k].seq, k + 1);
    const int from = got[k].payload["from"];
    const int i = got[k].payload["i"];
    EXPECT_EQ(i, last[from] + 1);
    last[from] = i;
  }
}

// ---------------------------------------------------------------- TCP

std::vector<Envelope> collect(BusClient& client, std::size_t n, std::chrono::milliseconds timeout = 5s) {
  std::vector<Envelope> out;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (out.size() < n && std::chrono::steady_clock::now() < deadline) {
    if (auto env = client.next(50ms)) {
      out.push_back(*env);
    }
  }
  return out;
}

TEST(Tcp, TwoClientsReceiveTheSamePublish) {
  Broker broker;
  TcpServer server(broker, 0);
  BusClient a("127.0.0.1", server.port(), "a");
  BusClient b("127.0.0.1", server.port(), "b");
  BusClient pub("127.0.0.1", server.port(), "pub");
  a.subscribe("/joint/state");
  b.subscribe("/joint/*");
  pub.publish("/joint/state", "JointState", {{"position", {0.1, 0.2}}});
  const auto ga = collect(a, 1);
  const auto gb = collect(b, 1);
  ASSERT_EQ(ga.size(), 1u);
  ASSERT_EQ(gb.size(), 1u);
  EXPECT_EQ(ga[0], gb[0]);
  EXPECT_EQ(ga[0].seq, 1u);
  EXPECT_EQ(ga[0].payload["position"][1], 0.2);
}

TEST(Tcp, NetworkEnvelopesAreRestampedWithBrokerTime) {
  Broker broker;
  broker.set_clock([] { return 12.5; });
  TcpServer server(broker, 0);
  BusClient sub("127.0.0.1", server.port(), "sub");
  BusClient pub("127.0.0.1", server.port(), "pub");
  sub.subscribe("/x");
  Envelope env = make("/x");
  env.stamp = 999.0;
  env.seq = 7;
  pub.send(env);
  const auto got = collect(sub, 1);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].stamp, 12.5);
  EXPECT_EQ(got[0].seq, 1u);
}

TEST(Broker, TapSeesEveryPublishWithItsPublisher) {
  Broker broker;
  std::vector<std::pair<std::string, std::uint64_t>> seen;
  broker.set_tap([&](const Envelope& env, std::string_view publisher) {
    seen.emplace_back(std::string(publisher), env.seq);
  });
  auto sub = broker.subscribe("/a");
  Envelope env;
  env.topic = "/a";
  broker.publish(env, "one");
  env.topic = "/b";
  broker.publish(env, "two");
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], std::make_pair(std::string("one"), std::uint64_t{1}));
  EXPECT_EQ(seen[1], std::make_pair(std::string("two"), std::uint64_t{1}));
  broker.set_tap({});
  broker.publish(env, "three");
  EXPECT_EQ(seen.size(), 2u);
}

TEST(Broker, InterceptedEnvelopesAreNotDelivered) {
  Broker broker;
  std::vector<std::string> held;
  broker.set_intercept([&](const Envelope& env, std::string_view publisher) {
    if (publisher != "remote") return false;
    held.push_back(env.topic);
    return true;
  });
  auto sub = broker.subscribe("/*");
  Envelope env;
  env.topic = "/x";
  const Envelope returned = broker.publish(env, "remote");
  EXPECT_EQ(returned.seq, 0u);  // not stamped
  EXPECT_EQ(sub->size(), 0u);
  EXPECT_EQ(held, std::vector<std::string>{"/x"});
  broker.publish(env, "local");
  ASSERT_EQ(sub->size(), 1u);
  EXPECT_EQ(sub->try_pop()->seq, 1u);  // the held one never consumed a sequence number
}

TEST(Tcp, ThreeConcurrentPublishersKeepOrder) {
  Broker broker;
  TcpServer server(broker, 0);
  BusClient sub("127.0.0.1", server.port(), "sub");
  sub.subscribe("/shared");
  constexpr int kPerClient = 60;  // 180 < 256: nothing is dropped
  std::vector<std::thread> threads;
  for (int t = 0; t < 3; ++t) {
    threads.emplace_back([&, t] {
      BusClient pub("127.0.0.1", server.port(), "p" + std::to_string(t));
      for (int i = 0; i < kPerClient; ++i) {
        pub.publish("/shared", "Test", {{"from", t}, {"i", i}});
      }
      pub.close();
    });
  }
  for (auto& th : threads) th.join();
  const auto got = collect(sub, 3 * kPerClient);
  ASSERT_EQ(got.size(), 3u * kPerClient);
  std::map<int, int> last{{0, -1}, {1, -1}, {2, -1}};
  for (std::size_t k = 0; k < got.size(); ++k) {
    EXPECT_EQ(got[k].seq, k + 1);
    const int from = got[k].payload["from"];
    const int i = got[k].payload["i"];
    EXPECT_EQ(i, last[from] + 1);
    last[from] = i;
  }
}

namespace asio = boost::asio;
using asio::ip::tcp;

std::string hello_frame(const std::string& name) {
  return encode_frame(make("/meta/hello", {{"node_name", name}}, "Meta"));
}

Envelope read_one(tcp::socket& s) {
  std::array<unsigned char, 4> header{};
  asio::read(s, asio::buffer(header));
  std::string body(read_be32(header.data()), '\0');
  asio::read(s, asio::buffer(body));
  return parse_envelope(body);
}

TEST(Tcp, FirstFrameMustBeHello) {
  Broker broker;
  TcpServer server(broker, 0);
  asio::io_context io;
  tcp::socket s(io);
  s.connect({asio::ip::make_address("127.0.0.1"), server.port()});
  asio::write(s, asio::buffer(encode_frame(make("/joint/target", {{"x", 1}}))));
  const Envelope reply = read_one(s);
  EXPECT_EQ(reply.topic, "/meta/error");
  EXPECT_EQ(reply.payload["code"], "Protocol");
  std::array<char, 1> byte{};
  boost::system::error_code ec;
  s.read_some(asio::buffer(byte), ec);
  EXPECT_TRUE(ec);  // server hung up
  EXPECT_TRUE(broker.topics().empty());
}

TEST(Tcp, AbruptDisconnectMidFrameLeavesOthersWorking) {
  Broker broker;
  TcpServer server(broker, 0);
  BusClient sub("127.0.0.1", server.port(), "sub");
  sub.subscribe("/after");
  {
    asio::io_context io;
    tcp::socket s(io);
    s.connect({asio::ip::make_address("127.0.0.1"), server.port()});
    asio::write(s, asio::buffer(hello_frame("flaky")));
    EXPECT_EQ(read_one(s).topic, "/meta/welcome");
    const std::string frame = encode_frame(make("/after", {{"partial", true}}));
    asio::write(s, asio::buffer(frame.data(), frame.size() / 2));
    s.close();
  }
  for (int i = 0; i < 100 && server.session_count() > 1; ++i) {
    std::this_thread::sleep_for(10ms);
  }
  EXPECT_EQ(server.session_count(), 1u);
  BusClient pub("127.0.0.1", server.port(), "pub");
  pub.publish("/after", "Test", {{"ok", true}});
  const auto got = collect(sub, 1);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].payload["ok"], true);
  EXPECT_EQ(got[0].seq, 1u);  // the half frame was never published
}

TEST(Tcp, OversizedLengthPrefixIsRejected) {
  Broker broker;
  TcpServer server(broker, 0);
  asio::io_context io;
  tcp::socket s(io);
  s.connect({asio::ip::make_address("127.0.0.1"), server.port()});
  asio::write(s, asio::buffer(hello_frame("big")));
  EXPECT_EQ(read_one(s).topic, "/meta/welcome");
  const unsigned char header[4] = {0x01, 0x10, 0x00, 0x00};  // 17 MiB
  asio::write(s, asio::buffer(header));
  const Envelope reply = read_one(s);
  EXPECT_EQ(reply.topic, "/meta/error");
  EXPECT_EQ(reply.payload["code"], "FrameTooLarge");
}

TEST(Tcp, ControlTopics) {
  Broker broker;
  TcpServer server(broker, 0);
  BusClient c("127.0.0.1", server.port(), "ctl");
  EXPECT_EQ(error_of([&] { c.subscribe("/bad*"); }), BusErrc::kBadPattern);
  c.subscribe("/a/*");
  c.publish("/a/b", "AB", {});
  ASSERT_EQ(collect(c, 1).size(), 1u);
  c.send(make("/meta/topics", json::object(), "Meta"));
  const auto reply = collect(c, 1);
  ASSERT_EQ(reply.size(), 1u);
  EXPECT_EQ(reply[0].topic, "/meta/topics");
  ASSERT_EQ(reply[0].payload["topics"].size(), 1u);
  EXPECT_EQ(reply[0].payload["topics"][0]["topic"], "/a/b");
  EXPECT_EQ(reply[0].payload["topics"][0]["publishers"], 1);
  c.unsubscribe("/a/*");
  c.publish("/a/b", "AB", {});
  EXPECT_TRUE(collect(c, 1, 200ms).empty());
}

TEST(Tcp, ConnectFailureIsReported) {
  std::uint16_t port = 0;
  {
    Broker broker;
    TcpServer server(broker, 0);
    port = server.port();
  }
  EXPECT_EQ(error_of([&] { BusClient c("127.0.0.1", port, "x", 500ms); }), BusErrc::kConnection);
}

}  // namespace
}  // namespace sociobot::bus
