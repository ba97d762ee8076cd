#include "dexp/server.h"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

namespace dexp {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Service& service)
      : ws_(std::move(socket)), service_(service) {}

  void start() {
    ws_.set_option(
        websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->close_inbox();
      self->read();
    });
  }

  /// Runs on the connection's worker thread until the inbox closes.
  void work() {
    for (;;) {
      std::string frame;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return closed_ || !inbox_.empty(); });
        if (inbox_.empty()) return;
        frame = std::move(inbox_.front());
        inbox_.pop_front();
      }
      std::string response = service_.handle_text(frame);
      net::post(ws_.get_executor(),
                [self = shared_from_this(), r = std::move(response)]() mutable {
                  self->send(std::move(r));
                });
    }
  }

  void close_inbox() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  /// io thread only.
  void shutdown() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).close();
    close_inbox();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec,
                                                         std::size_t) {
      if (ec) return self->close_inbox();
      std::string frame = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      try {
        self->service_.preannounce(nlohmann::json::parse(frame));
      } catch (const nlohmann::json::exception&) {
        // answered by the worker
      }
      {
        std::lock_guard lock(self->mu_);
        self->inbox_.push_back(std::move(frame));
      }
      self->cv_.notify_one();
      self->read();
    });
  }

  void send(std::string message) {
    outbox_.push_back(std::move(message));
    if (outbox_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec,
                                                std::size_t) {
                      if (ec) {
                        self->outbox_.clear();
                        return self->close_inbox();
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  Service& service_;
  std::deque<std::string> outbox_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> inbox_;
  bool closed_ = false;
};

}  // namespace

struct Server::Impl {
  Impl(Service& service, std::uint16_t port, const std::string& address)
      : service(service), acceptor(ioc) {
    tcp::endpoint ep(net::ip::make_address(address), port);
    acceptor.open(ep.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
    bound_port = acceptor.local_endpoint().port();
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto conn = std::make_shared<Connection>(std::move(socket), service);
      {
        std::lock_guard lock(mu);
        connections.push_back(conn);
        workers.emplace_back([conn] { conn->work(); });
      }
      conn->start();
      accept();
    });
  }

  Service& service;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::uint16_t bound_port = 0;
  std::thread io_thread;
  bool running = false;

  std::mutex mu;
  std::vector<std::weak_ptr<Connection>> connections;
  std::vector<std::thread> workers;
};

Server::Server(Service& service, std::uint16_t port, std::string address)
    : impl_(std::make_unique<Impl>(service, port, address)) {}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->bound_port; }

void Server::start() {
  if (impl_->running) return;
  impl_->running = true;
  impl_->accept();
  impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
}

void Server::stop() {
  if (!impl_->running) return;
  impl_->running = false;
  net::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    std::lock_guard lock(impl_->mu);
    for (auto& weak : impl_->connections) {
      if (auto conn = weak.lock()) conn->shutdown();
    }
  });
  // Handlers cancelled by the shutdown above still run; the context runs
  // out of work once they have.
  impl_->io_thread.join();

  std::vector<std::thread> workers;
  {
    std::lock_guard lock(impl_->mu);
    for (auto& weak : impl_->connections) {
      if (auto conn = weak.lock()) conn->close_inbox();
    }
    workers.swap(impl_->workers);
  }
  for (auto& t : workers) t.join();
}

}  // namespace dexp
