// Wire types mirroring the gateway's /v1 JSON surface.

export type MediaKind = 'image' | 'video' | 'audio' | 'text'

export interface OverlayEvent {
  text: string
  role: 'subtitle' | 'label' | 'transition'
  position: 'bottom' | 'top' | 'center'
}

export interface SynthFrame {
  t_ms: number
  fill_rgb: [number, number, number]
  overlays: OverlayEvent[]
  tags: Record<string, string>
}

export interface AudioSegment {
  t0_ms: number
  t1_ms: number
  text: string
  kind: 'speech' | 'silence'
  loudness_lufs: number
}

export interface Manifest {
  kind: MediaKind
  width: number
  height: number
  fps: number
  duration_ms: number
  frames: SynthFrame[]
  audio: AudioSegment[]
  text: string
  meta: Record<string, string>
}

export interface ArtifactEnvelope {
  artifact_id: string
  kind: MediaKind
  payload: Manifest
  produced_by: 'direct-invoke' | { run_id: string; step_index: number }
  inputs: string[]
  created_at: string
}

export interface ParamSchema {
  name: string
  type: string
  required: boolean
  default?: unknown
  choices?: string[]
}

export interface CapabilityInfo {
  capability: string
  tool_name: string
  routing_class: 'routed' | 'local'
  output_kind: MediaKind
  params: ParamSchema[]
  providers: string[]
}

export interface SkillInfo {
  name: string
  description: string
  params: ParamSchema[]
}

export interface StepRecord {
  name: string
  state: 'pending' | 'running' | 'succeeded' | 'failed'
  attempts: number
  outputs: string[]
}

export interface RunRecord {
  run_id: string
  skill_name: string
  params: Record<string, unknown>
  state: 'pending' | 'running' | 'succeeded' | 'failed'
  steps: StepRecord[]
  final_outputs: string[]
  started_at: string
  ended_at: string
}

export interface RunEvent {
  run_id: string
  seq: number
  kind:
    | 'run_started'
    | 'step_started'
    | 'artifact_produced'
    | 'step_retried'
    | 'step_failed'
    | 'step_succeeded'
    | 'run_finished'
  payload: Record<string, any>
}

export interface ApiError {
  code: string
  message: string
  details: Record<string, unknown>
}

export function isApiError(value: unknown): value is ApiError {
  return (
    typeof value === 'object' &&
    value !== null &&
    typeof (value as ApiError).code === 'string' &&
    typeof (value as ApiError).message === 'string'
  )
}
