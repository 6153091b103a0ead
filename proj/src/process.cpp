#include "catalia/process.hpp"

#include "catalia/error.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

namespace catalia {

namespace {

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

} // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input, double timeout_s) {
    if (argv.empty()) throw BackendSpawnError("empty command line");
    int in[2], out[2], err[2], ex[2];
    if (::pipe(in) || ::pipe(out) || ::pipe(err) || ::pipe2(ex, O_CLOEXEC))
        throw BackendSpawnError(std::string("pipe: ") + std::strerror(errno));

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    const auto start = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) throw BackendSpawnError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::dup2(in[0], 0);
        ::dup2(out[1], 1);
        ::dup2(err[1], 2);
        for (int fd : {in[0], in[1], out[0], out[1], err[0], err[1], ex[0]}) ::close(fd);
        ::setpgid(0, 0);
        ::execvp(args[0], args.data());
        int e = errno;
        (void)!::write(ex[1], &e, sizeof e);
        ::_exit(127);
    }
    ::close(in[0]);
    ::close(out[1]);
    ::close(err[1]);
    ::close(ex[1]);

    int code = 0;
    if (::read(ex[0], &code, sizeof code) == static_cast<ssize_t>(sizeof code)) {
        ::close(ex[0]);
        ::close(in[1]);
        ::close(out[0]);
        ::close(err[0]);
        ::waitpid(pid, nullptr, 0);
        throw BackendSpawnError("cannot execute '" + argv[0] + "': " + std::strerror(code));
    }
    ::close(ex[0]);

    ::signal(SIGPIPE, SIG_IGN);
    ::fcntl(in[1], F_SETFL, O_NONBLOCK);
    int fds[3] = {in[1], out[0], err[0]};
    std::size_t written = 0;
    if (input.empty()) close_fd(fds[0]);
    ProcessResult r;
    char buf[65536];
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    while (fds[1] >= 0 || fds[2] >= 0) {
        int wait_ms = -1;
        if (timeout_s > 0) {
            double left = timeout_s - elapsed();
            if (left <= 0) {
                r.timed_out = true;
                break;
            }
            wait_ms = static_cast<int>(left * 1000) + 1;
        }
        pollfd p[3];
        nfds_t n = 0;
        int which[3];
        if (fds[0] >= 0) { p[n] = {fds[0], POLLOUT, 0}; which[n++] = 0; }
        if (fds[1] >= 0) { p[n] = {fds[1], POLLIN, 0}; which[n++] = 1; }
        if (fds[2] >= 0) { p[n] = {fds[2], POLLIN, 0}; which[n++] = 2; }
        int rc = ::poll(p, n, wait_ms);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (nfds_t i = 0; i < n; ++i) {
            if (!p[i].revents) continue;
            int w = which[i];
            if (w == 0) {
                ssize_t k = ::write(fds[0], input.data() + written, input.size() - written);
                if (k > 0) written += static_cast<std::size_t>(k);
                if (k < 0 && errno != EAGAIN) written = input.size();
                if (written == input.size()) close_fd(fds[0]);
            } else {
                ssize_t k = ::read(fds[w], buf, sizeof buf);
                if (k > 0) (w == 1 ? r.out : r.err).append(buf, static_cast<std::size_t>(k));
                else if (k == 0 || errno != EAGAIN) close_fd(fds[w]);
            }
        }
    }
    for (int& fd : fds) close_fd(fd);
    if (r.timed_out) ::kill(-pid, SIGKILL), ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.seconds = elapsed();
    return r;
}

} // namespace catalia
