// Run timeline store: folds the event stream into one row per step.
// Events are applied strictly in seq order no matter how they arrive;
// out-of-order deliveries are buffered until the gap closes.

import type { RunEvent } from './types.js'

export interface ArtifactRef {
  artifactId: string
  kind: string
}

export interface StepRow {
  index: number
  name: string
  state: 'pending' | 'running' | 'succeeded' | 'failed'
  attempts: number
  retries: number
  errorCode: string
  artifacts: ArtifactRef[]
}

export interface TimelineState {
  runId: string
  skillName: string
  state: 'pending' | 'running' | 'succeeded' | 'failed'
  params: Record<string, unknown>
  steps: StepRow[]
  finalOutputs: string[]
  failureFrontier: number | null
  appliedSeq: number // highest contiguously applied seq
}

export class TimelineStore {
  readonly state: TimelineState
  private pending = new Map<number, RunEvent>()
  private nextSeq = 0

  constructor(runId: string) {
    this.state = {
      runId,
      skillName: '',
      state: 'pending',
      params: {},
      steps: [],
      finalOutputs: [],
      failureFrontier: null,
      appliedSeq: -1,
    }
  }

  /** Accept an event in any arrival order; duplicates are ignored. */
  ingest(event: RunEvent): void {
    if (event.seq < this.nextSeq || this.pending.has(event.seq)) return
    this.pending.set(event.seq, event)
    while (this.pending.has(this.nextSeq)) {
      const next = this.pending.get(this.nextSeq)!
      this.pending.delete(this.nextSeq)
      this.apply(next)
      this.state.appliedSeq = next.seq
      this.nextSeq += 1
    }
  }

  ingestAll(events: RunEvent[]): void {
    for (const event of events) this.ingest(event)
  }

  private step(index: number): StepRow {
    return this.state.steps[index]
  }

  private apply(event: RunEvent): void {
    const p = event.payload
    switch (event.kind) {
      case 'run_started':
        this.state.skillName = p.skill_name
        this.state.params = p.params
        this.state.state = 'running'
        this.state.steps = (p.step_names as string[]).map((name, index) => ({
          index,
          name,
          state: 'pending',
          attempts: 0,
          retries: 0,
          errorCode: '',
          artifacts: [],
        }))
        break
      case 'step_started':
        this.step(p.step_index).state = 'running'
        break
      case 'artifact_produced':
        this.step(p.step_index).artifacts.push({
          artifactId: p.artifact_id,
          kind: p.kind,
        })
        break
      case 'step_retried': {
        const row = this.step(p.step_index)
        row.retries += 1
        row.errorCode = p.error_code
        break
      }
      case 'step_succeeded': {
        const row = this.step(p.step_index)
        row.state = 'succeeded'
        row.attempts = p.attempts
        row.errorCode = ''
        break
      }
      case 'step_failed': {
        const row = this.step(p.step_index)
        row.state = 'failed'
        row.attempts = p.attempts
        row.errorCode = p.error_code
        if (this.state.failureFrontier === null || p.step_index < this.state.failureFrontier) {
          this.state.failureFrontier = p.step_index
        }
        break
      }
      case 'run_finished':
        this.state.state = p.state
        this.state.finalOutputs = p.final_outputs
        break
    }
  }

  get finished(): boolean {
    return this.state.state === 'succeeded' || this.state.state === 'failed'
  }
}
