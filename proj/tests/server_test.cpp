#include <rehab/capture.hpp>
#include <rehab/server.hpp>

#include "test_support.hpp"
#include "ws_client.hpp"

#include <gtest/gtest.h>

using namespace rehab;
namespace rt = rehab::testing;
using rehab::testing::fixture_path;
using rehab::testing::TempDir;
using rehab::testing::WsClient;

namespace {

const std::string kStart = R"({"type":"session_cmd","cmd":"start"})";
const std::string kStop = R"({"type":"session_cmd","cmd":"stop"})";

}  // namespace

TEST(ParseBind, AcceptsHostPortAndRejectsGarbage) {
    auto ep = parse_bind("127.0.0.1:8737");
    EXPECT_EQ(ep.port(), 8737);
    EXPECT_THROW(parse_bind("localhost"), ServerError);
    EXPECT_THROW(parse_bind("nohost:1"), ServerError);
    EXPECT_THROW(parse_bind("127.0.0.1:99999"), ServerError);
}

TEST(Server, SecondBindToSamePortFails) {
    TempDir dir;
    Server a("127.0.0.1:0", {}, dir / "s");
    EXPECT_THROW(Server("127.0.0.1:" + std::to_string(a.port()), {}, dir / "s"), ServerError);
}

TEST(Server, LiveReplayMatchesOfflineReplay) {
    TempDir dir;
    Server server("127.0.0.1:0", {}, dir / "store");
    server.start();
    WsClient client(server.port());
    client.send(kStart);
    auto started = client.until_result();
    ASSERT_TRUE(std::get<CmdResultMsg>(started.back()).ok);
    ASSERT_TRUE(std::holds_alternative<StateMsg>(client.receive()));

    for (const auto& m : rt::frame_messages(fixture_path("success.frames.jsonl"))) client.send(m);
    client.send(kStop);
    auto msgs = client.until_result();

    auto offline_src = open_replay(fixture_path("success.frames.jsonl"));
    auto offline = run_session(*offline_src, GameConfig{});
    EXPECT_EQ(rt::events_of(msgs), offline.events);
    EXPECT_TRUE(std::get<CmdResultMsg>(msgs.back()).ok);
}

TEST(Server, ConnectionsAreIsolated) {
    TempDir dir;
    Server server("127.0.0.1:0", {}, dir / "store");
    server.start();
    WsClient a(server.port()), b(server.port());
    a.send(kStart);
    a.until_result();
    // b has no session even though a does.
    b.send(R"({"type":"pointer_input","x":0,"z":1.5,"grab":false})");
    auto err = b.receive();
    ASSERT_TRUE(std::holds_alternative<ErrorMsg>(err));
    EXPECT_EQ(std::get<ErrorMsg>(err).code, "NoActiveSession");
    b.send(R"({"type":"frame"})");
    EXPECT_EQ(std::get<ErrorMsg>(b.receive()).code, "MalformedMessage");

    a.send(kStop);
    auto stopped = a.until_result();
    ASSERT_TRUE(std::get<CmdResultMsg>(stopped.back()).ok);
    b.send(R"({"type":"session_cmd","cmd":"list"})");
    auto list = b.until_result();
    EXPECT_EQ(std::get<CmdResultMsg>(list.back()).payload["sessions"].size(), 1u);
}
