#include "pimhub/hub/ws_server.hpp"

#include <deque>
#include <map>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace pimhub {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Connection;

struct Shared {
  Hub &hub;
  std::string path;
  std::map<ConnectionId, std::weak_ptr<Connection>> live;
  ConnectionId next = 1;

  void dispatch(std::vector<Delivery> deliveries);
};

class Connection : public std::enable_shared_from_this<Connection> {
public:
  Connection(tcp::socket socket, Shared &shared)
      : ws_(std::move(socket)), shared_(shared) {}

  void start() {
    auto self = shared_from_this();
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

  void enqueue(std::string frame) {
    outbox_.push_back(std::move(frame));
    if (outbox_.size() == 1)
      write_next();
  }

private:
  void on_request(beast::error_code ec) {
    if (ec)
      return;
    if (!websocket::is_upgrade(request_) || request_.target() != shared_.path) {
      auto res = std::make_shared<http::response<http::string_body>>(
          http::status::not_found, request_.version());
      res->body() = "websocket endpoint is " + shared_.path + "\n";
      res->prepare_payload();
      auto self = shared_from_this();
      http::async_write(ws_.next_layer(), *res,
                        [self, res](beast::error_code, std::size_t) {
                          beast::error_code ignored;
                          self->ws_.next_layer().shutdown(tcp::socket::shutdown_both,
                                                          ignored);
                        });
      return;
    }
    ws_.read_message_max(wire::kMaxFrameBytes + 1);
    auto self = shared_from_this();
    ws_.async_accept(request_, [self](beast::error_code ec) { self->on_accept(ec); });
  }

  void on_accept(beast::error_code ec) {
    if (ec)
      return;
    id_ = shared_.next++;
    shared_.live[id_] = weak_from_this();
    shared_.dispatch(shared_.hub.open(id_));
    read_next();
  }

  void read_next() {
    auto self = shared_from_this();
    ws_.async_read(buffer_, [self](beast::error_code ec, std::size_t) {
      if (ec) {
        self->finish();
        return;
      }
      auto frame = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->shared_.dispatch(self->shared_.hub.receive_frame(self->id_, frame));
      self->read_next();
    });
  }

  void write_next() {
    auto self = shared_from_this();
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()),
                    [self](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->finish();
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty())
                        self->write_next();
                    });
  }

  void finish() {
    if (closed_ || id_ == 0)
      return;
    closed_ = true;
    shared_.live.erase(id_);
    shared_.dispatch(shared_.hub.close(id_));
  }

  websocket::stream<tcp::socket> ws_;
  Shared &shared_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::deque<std::string> outbox_;
  ConnectionId id_ = 0;
  bool closed_ = false;
};

void Shared::dispatch(std::vector<Delivery> deliveries) {
  while (!deliveries.empty()) {
    std::vector<Delivery> more;
    for (auto &d : deliveries) {
      auto it = live.find(d.to);
      std::shared_ptr<Connection> c;
      if (it != live.end())
        c = it->second.lock();
      if (!c) {
        auto extra = hub.undeliverable(d);
        more.insert(more.end(), extra.begin(), extra.end());
        continue;
      }
      c->enqueue(wire::encode(d.message));
    }
    deliveries = std::move(more);
  }
}

} // namespace

struct WsServer::Impl {
  asio::io_context io{1};
  tcp::acceptor acceptor{io};
  asio::signal_set signals{io};
  Shared shared;
  bool stopOnSignal;

  Impl(Hub &hub, const ServerOptions &o)
      : shared{hub, o.path, {}, 1}, stopOnSignal(o.stopOnSignal) {
    tcp::endpoint ep(asio::ip::make_address(o.address), o.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec)
        return;
      std::make_shared<Connection>(std::move(socket), shared)->start();
      accept();
    });
  }
};

WsServer::WsServer(Hub &hub, ServerOptions options)
    : impl_(std::make_unique<Impl>(hub, options)) {}

WsServer::~WsServer() = default;

std::uint16_t WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::run() {
  if (impl_->stopOnSignal) {
    impl_->signals.add(SIGINT);
    impl_->signals.add(SIGTERM);
    impl_->signals.async_wait([this](beast::error_code, int) { stop(); });
  }
  impl_->accept();
  impl_->io.run();
}

void WsServer::stop() {
  asio::post(impl_->io, [this] {
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
    impl_->signals.cancel(ignored);
    impl_->io.stop();
  });
}

} // namespace pimhub
