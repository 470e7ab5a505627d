// Resumable run-event subscription over the gateway's SSE endpoint.
// Reconnects resume from the last applied seq (via from_seq), so a dropped
// connection never loses or duplicates events. The transport is injectable
// for tests.

import type { RunEvent } from './types.js'

export interface SseMessage {
  id: number
  event: string
  data: string
}

/** Opens one SSE connection; yields messages until the server closes it. */
export type SseTransport = (url: string) => AsyncIterable<SseMessage>

/** Parse a raw text/event-stream body into messages. */
export async function* parseSseStream(
  chunks: AsyncIterable<string>,
): AsyncGenerator<SseMessage> {
  let buffer = ''
  let current: Partial<SseMessage> = {}
  const flush = function* (): Generator<SseMessage> {
    if (current.data !== undefined) {
      yield {
        id: current.id ?? -1,
        event: current.event ?? 'message',
        data: current.data,
      }
    }
    current = {}
  }
  for await (const chunk of chunks) {
    buffer += chunk
    let newline: number
    while ((newline = buffer.indexOf('\n')) >= 0) {
      const line = buffer.slice(0, newline).replace(/\r$/, '')
      buffer = buffer.slice(newline + 1)
      if (line === '') {
        yield* flush()
        continue
      }
      const sep = line.indexOf(': ')
      if (sep < 0) continue
      const field = line.slice(0, sep)
      const value = line.slice(sep + 2)
      if (field === 'id') current.id = Number(value)
      else if (field === 'event') current.event = value
      else if (field === 'data') current.data = value
    }
  }
  yield* flush()
}

export function fetchTransport(fetchImpl: typeof fetch = fetch): SseTransport {
  return (url: string) => {
    async function* stream(): AsyncGenerator<SseMessage> {
      const response = await fetchImpl(url, {
        headers: { accept: 'text/event-stream' },
      })
      if (!response.ok || response.body === null) {
        throw new Error(`event stream failed: HTTP ${response.status}`)
      }
      const reader = response.body.getReader()
      const decoder = new TextDecoder()
      async function* chunks(): AsyncGenerator<string> {
        for (;;) {
          const { done, value } = await reader.read()
          if (done) return
          yield decoder.decode(value, { stream: true })
        }
      }
      yield* parseSseStream(chunks())
    }
    return stream()
  }
}

export interface SubscribeOptions {
  fromSeq?: number
  maxReconnects?: number
  onReconnect?: (fromSeq: number) => void
}

/**
 * Subscribe to a run's events, reconnecting with resume until run_finished.
 * Yields each event exactly once, in seq order as sent by the server.
 */
export async function* subscribeRunEvents(
  baseUrl: string,
  runId: string,
  transport: SseTransport,
  options: SubscribeOptions = {},
): AsyncGenerator<RunEvent> {
  let fromSeq = options.fromSeq ?? 0
  const maxReconnects = options.maxReconnects ?? 20
  let attempts = 0
  for (;;) {
    const url = `${baseUrl}/v1/runs/${runId}/events?from_seq=${fromSeq}`
    let sawFinish = false
    try {
      for await (const message of transport(url)) {
        const event = JSON.parse(message.data) as RunEvent
        if (event.seq < fromSeq) continue // duplicate after a racy reconnect
        fromSeq = event.seq + 1
        yield event
        if (event.kind === 'run_finished') {
          sawFinish = true
          break
        }
      }
    } catch (error) {
      attempts += 1
      if (attempts > maxReconnects) throw error
      options.onReconnect?.(fromSeq)
      continue
    }
    if (sawFinish) return
    // server closed without run_finished: resume from the next seq
    attempts += 1
    if (attempts > maxReconnects) {
      throw new Error(`stream for run ${runId} closed ${attempts} times before finishing`)
    }
    options.onReconnect?.(fromSeq)
  }
}
