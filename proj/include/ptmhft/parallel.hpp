#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ptmhft {

inline std::size_t default_thread_count()
{
	return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
/// claimed dynamically; callers write results into slot i so the assembled
/// output does not depend on scheduling. The first exception is rethrown.
template<typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn)
{
	threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
	if(threads == 1)
	{
		for(std::size_t i = 0; i < count; ++i) fn(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::exception_ptr failure;
	std::mutex failure_mutex;
	{
		std::vector<std::jthread> pool;
		pool.reserve(threads);
		for(std::size_t w = 0; w < threads; ++w)
			pool.emplace_back([&] {
				for(std::size_t i = next++; i < count; i = next++)
				{
					try
					{
						fn(i);
					}
					catch(...)
					{
						std::lock_guard lock(failure_mutex);
						if(!failure) failure = std::current_exception();
					}
				}
			});
	}
	if(failure) std::rethrow_exception(failure);
}

} // namespace ptmhft
