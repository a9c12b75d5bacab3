#include <doctest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <thread>

#include "pimhub/hub/ws_server.hpp"
#include "pimhub/wire/codec.hpp"

using namespace pimhub;
namespace beast = boost::beast;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

struct Client {
  net::io_context io;
  beast::websocket::stream<tcp::socket> ws{io};

  explicit Client(std::uint16_t port) {
    tcp::resolver resolver(io);
    net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws.handshake("127.0.0.1", "/sync");
  }

  void send(const wire::WireMessage &m) { ws.write(net::buffer(wire::encode(m))); }

  wire::WireMessage read() {
    beast::flat_buffer buf;
    ws.read(buf);
    return wire::decode(beast::buffers_to_string(buf.data()));
  }
};

wire::WireMessage hello(const std::string &device) {
  return {"h1", std::nullopt,
          wire::Hello{UserId("ann"), "pw", {DeviceId(device), DeviceKind::Desktop, device}, true}};
}

} // namespace

TEST_SUITE("server") {

TEST_CASE("hello over a real socket") {
  Hub hub({}, std::make_shared<MemoryStore>());
  WsServer server(hub, {"127.0.0.1", 0});
  std::thread t([&] { server.run(); });

  {
    Client a(server.port());
    a.send(hello("laptop"));
    const auto w = a.read();
    REQUIRE(w.kind() == wire::Kind::Welcome);
    CHECK(w.serverSeq.has_value());

    Client b(server.port());
    b.send(hello("phone"));
    CHECK(b.read().kind() == wire::Kind::Welcome);
    // a hears about b
    const auto p = a.read();
    CHECK(p.kind() == wire::Kind::PresenceUpdate);

    a.ws.write(net::buffer(std::string("{not json")));
    const auto e = a.read();
    REQUIRE(e.as<wire::ErrorMsg>());
    CHECK(e.as<wire::ErrorMsg>()->code == "MalformedFrame");
  }

  // plain HTTP on another path is not upgraded
  {
    net::io_context io;
    tcp::socket s(io);
    tcp::resolver resolver(io);
    net::connect(s, resolver.resolve("127.0.0.1", std::to_string(server.port())));
    beast::http::request<beast::http::empty_body> req{beast::http::verb::get, "/other", 11};
    req.set(beast::http::field::host, "127.0.0.1");
    beast::http::write(s, req);
    beast::flat_buffer buf;
    beast::http::response<beast::http::string_body> res;
    beast::http::read(s, buf, res);
    CHECK(res.result_int() == 404);
  }

  server.stop();
  t.join();
}

} // TEST_SUITE
