#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <sstream>

#include "lyapsip/field.h"

namespace lyapsip {

namespace {

// Owns one child process and the two pipe ends used to talk to it.
class ChildProcess {
 public:
  explicit ChildProcess(std::string command) : command_(std::move(command)) {}
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() {
    if (to_child_) std::fclose(to_child_);
    if (from_child_) std::fclose(from_child_);
    if (pid_ > 0) {
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  Vector Evaluate(const Vector& y, int dim) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (pid_ <= 0) Start();
    for (int i = 0; i < y.size(); ++i) {
      std::fprintf(to_child_, i == 0 ? "%.17g" : " %.17g", y[i]);
    }
    std::fputc('\n', to_child_);
    if (std::fflush(to_child_) != 0) Fail("write to evaluator failed");

    std::string line;
    int ch;
    while ((ch = std::fgetc(from_child_)) != EOF && ch != '\n') {
      line.push_back(static_cast<char>(ch));
    }
    if (line.empty() && ch == EOF) Fail("evaluator closed its output");
    std::istringstream in(line);
    Vector out(dim);
    for (int i = 0; i < dim; ++i) {
      if (!(in >> out[i])) Fail("could not parse evaluator reply '" + line + "'");
    }
    return out;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw std::runtime_error("external field '" + command_ + "': " + what);
  }

  void Start() {
    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
      Fail(std::string("pipe: ") + std::strerror(errno));
    }
    ::signal(SIGPIPE, SIG_IGN);
    pid_ = ::fork();
    if (pid_ < 0) Fail(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(in_pipe[0], STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      ::close(out_pipe[1]);
      ::execl("/bin/sh", "sh", "-c", command_.c_str(),
              static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = ::fdopen(in_pipe[1], "w");
    from_child_ = ::fdopen(out_pipe[0], "r");
    if (!to_child_ || !from_child_) Fail("fdopen failed");
  }

  std::string command_;
  std::mutex mutex_;
  pid_t pid_ = -1;
  FILE* to_child_ = nullptr;
  FILE* from_child_ = nullptr;
};

}  // namespace

VectorField MakeExternalProcessField(const std::string& command, int dim,
                                     std::string label) {
  if (command.empty()) {
    throw std::invalid_argument("external field: empty command");
  }
  auto child = std::make_shared<ChildProcess>(command);
  return VectorField(
      dim, [child, dim](const Vector& y) { return child->Evaluate(y, dim); },
      std::move(label));
}

}  // namespace lyapsip
