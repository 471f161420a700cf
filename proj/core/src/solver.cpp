#include "cvxc/solver.hpp"

#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace cvxc {

std::vector<std::string> expand_command(const std::string& command, const std::string& input,
                                        const std::string& output) {
  std::vector<std::string> words;
  std::string cur;
  bool in_word = false;
  char quote = 0;
  for (char ch : command) {
    if (quote) {
      if (ch == quote) quote = 0;
      else cur += ch;
    } else if (ch == '\'' || ch == '"') {
      quote = ch;
      in_word = true;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      if (in_word) words.push_back(std::move(cur));
      cur.clear();
      in_word = false;
    } else {
      cur += ch;
      in_word = true;
    }
  }
  if (quote) throw SolverError("unterminated quote in solver command");
  if (in_word) words.push_back(std::move(cur));

  auto subst = [](std::string w, const std::string& key, const std::string& value) {
    for (std::size_t p = w.find(key); p != std::string::npos; p = w.find(key, p + value.size()))
      w.replace(p, key.size(), value);
    return w;
  };
  for (auto& w : words) w = subst(subst(std::move(w), "{input}", input), "{output}", output);
  return words;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string excerpt(const std::string& s, std::size_t n = 800) {
  std::string t = s;
  while (!t.empty() && (t.back() == '\n' || t.back() == ' ')) t.pop_back();
  return t.size() <= n ? t : "..." + t.substr(t.size() - n);
}

std::string resolve_command(const SolverConfig& cfg) {
  if (!cfg.command.empty()) return cfg.command;
  if (const char* env = std::getenv("CVXC_SOLVER_CMD"); env && *env) return env;
  throw SolverError("no solver command configured (use --solver or CVXC_SOLVER_CMD)");
}

fs::path scratch_parent(const SolverConfig& cfg) {
  if (!cfg.tmpdir.empty()) return cfg.tmpdir;
  if (const char* env = std::getenv("CVXC_TMPDIR"); env && *env) return env;
  return fs::temp_directory_path();
}

class ScratchDir {
 public:
  ScratchDir(const fs::path& parent, bool keep) : keep_(keep) {
    std::string tmpl = (parent / "cvxc-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw SolverError("cannot create scratch directory in " + parent.string());
    path_ = tmpl;
  }
  ~ScratchDir() {
    std::error_code ec;
    if (!keep_) fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  bool keep_;
};

}  // namespace

std::string invoke_solver(const SolverConfig& cfg, const std::string& input, const std::string& output) {
  const std::string command = resolve_command(cfg);
  const auto words = expand_command(command, input, output);
  if (words.empty()) throw SolverError("empty solver command");

  const fs::path log = fs::path(output).replace_extension(".log");
  const int log_fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (log_fd < 0) throw SolverError("cannot open " + log.string());

  // The child reports an exec failure through a close-on-exec pipe.
  int status_pipe[2];
  if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
    ::close(log_fd);
    throw SolverError("pipe: " + std::string(std::strerror(errno)));
  }

  std::vector<char*> argv;
  for (const auto& w : words) argv.push_back(const_cast<char*>(w.c_str()));
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(log_fd);
    ::close(status_pipe[0]);
    ::close(status_pipe[1]);
    throw SolverError("fork: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(log_fd, STDOUT_FILENO);
    ::dup2(log_fd, STDERR_FILENO);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::execvp(argv[0], argv.data());
    const int err = errno;
    [[maybe_unused]] auto n = ::write(status_pipe[1], &err, sizeof err);
    ::_exit(127);
  }
  ::close(log_fd);
  ::close(status_pipe[1]);
  int exec_errno = 0;
  const bool exec_failed = ::read(status_pipe[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno;
  ::close(status_pipe[0]);

  int wstatus = 0;
  if (exec_failed) {
    ::waitpid(pid, &wstatus, 0);
    throw SolverNotFound(words[0]);
  }

  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration<double>(cfg.timeout_seconds);
  auto nap = std::chrono::milliseconds(1);
  for (;;) {
    const pid_t r = ::waitpid(pid, &wstatus, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw SolverError("waitpid: " + std::string(std::strerror(errno)));
    if (clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &wstatus, 0);
      throw SolverTimeout(command, cfg.timeout_seconds);
    }
    std::this_thread::sleep_for(nap);
    nap = std::min(nap * 2, std::chrono::milliseconds(20));
  }

  const int code = WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : 128 + WTERMSIG(wstatus);
  if (code != 0) throw SolverNonzeroExit(code, excerpt(read_file(log)));
  if (!fs::exists(output)) throw SolverError("solver exited without writing " + output);
  return read_file(output);
}

bool status_has_solution(const std::string& status) {
  for (const char* bad : {"INFEASIBLE", "ILL_POSED", "UNKNOWN"})
    if (status.find(bad) != std::string::npos) return false;
  return true;
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

}  // namespace

SolveResult solve(const Problem& p, const SolverConfig& cfg, const std::map<std::string, Value, std::less<>>& params,
                  const AtomRegistry& registry) {
  SolveResult r;
  r.canon = stage("canonicalize", [&] { return canonicalize(p, registry, params); });
  const std::string text = stage("write-cbf", [&] {
    r.cbf = build_cbf(r.canon.reduced.problem);
    return write_cbf(r.cbf);
  });

  const std::string reply = stage("invoke-solver", [&] {
    ScratchDir dir(scratch_parent(cfg), cfg.keep_files);
    const fs::path in = dir.path() / "problem.cbf";
    const fs::path out = dir.path() / "solution.sol";
    {
      std::ofstream os(in, std::ios::binary);
      os << text;
      if (!os) throw SolverError("cannot write " + in.string());
    }
    return invoke_solver(cfg, in.string(), out.string());
  });

  const SolutionFile sol = stage("parse-solution", [&] { return parse_solution(reply, r.cbf); });
  r.status = sol.status;
  if (!status_has_solution(sol.status)) return r;

  stage("map-back", [&] {
    if (sol.values.empty() && !r.cbf.variables.empty()) throw MissingVariable(r.cbf.variables.front().var);
    const Problem& q = r.canon.reduced.problem;
    r.reduced = sol.values;
    r.original = backward_apply(r.canon.reduction, *r.reduced);
    r.reduced_value = objective_value(q, *r.reduced);
    r.value = objective_value(r.canon.source, *r.original);
    r.reduced_residual = max_violation(q, *r.reduced);
    r.original_residual = max_violation(r.canon.source, *r.original);
    return 0;
  });
  return r;
}

}  // namespace cvxc
